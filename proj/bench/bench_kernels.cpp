// Serial reference vs OpenMP for the sweep kernels. The argument selects the
// execution policy: 0 serial, 1 parallel.
#include "regrecon/modelled.hpp"
#include "regrecon/mollify.hpp"
#include "regrecon/reconstruct.hpp"
#include "regrecon/rough_path.hpp"
#include "regrecon/weierstrass.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace regrecon;

namespace {

Exec policy(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

const Lattice kLat{11};

std::shared_ptr<const HolderModel> holder() {
  static auto Z = [] {
    auto W = std::make_shared<Weierstrass>(0.6, default_terms(kLat), 1);
    return std::make_shared<const HolderModel>(0.6, 1.0, nullptr,
                                               [W](double t) { return W->centered(t); }, kLat,
                                               IndexRange{kLat.index(-1.0), kLat.index(2.0)});
  }();
  return Z;
}

const IndexRange kUnit{kLat.index(0.0), kLat.index(1.0)};

void BM_ModelSeminorm(benchmark::State& st) {
  ScaleFamily fam(kLat, make_test_family(2), {2, 3, 4, 5, 6, 7});
  const auto xs = strided(kUnit, 32);
  const auto pairs = make_pair_sample(kLat, kUnit, 32, 16);
  for (auto _ : st)
    benchmark::DoNotOptimize(estimate_model_seminorm(*holder(), 1.0, fam, xs, pairs, policy(st)).total());
}
BENCHMARK(BM_ModelSeminorm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MollifiedModel(benchmark::State& st) {
  for (auto _ : st) {
    MollifiedModel m(holder(), DiscreteMollifier(3, 1.0 / 16, kLat),
                     {kLat.index(-0.5), kLat.index(1.5)}, false, policy(st));
    benchmark::DoNotOptimize(m.pi(0.5, 1, 0.5));
  }
}
BENCHMARK(BM_MollifiedModel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DGammaNorm(benchmark::State& st) {
  auto ext = std::make_shared<const StarExtendedModel>(holder(), 1.0);
  Vec e = Vec::Zero(holder()->structure().dim());
  e[1] = 1;
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), e, ext, kLat,
                               {kLat.index(-1.0), kLat.index(2.0)});
  const auto pairs = make_pair_sample(kLat, kUnit, 16, 16);
  for (auto _ : st) benchmark::DoNotOptimize(dgamma_norm(f, 0.95, kInf, kInf, pairs, policy(st)).total);
}
BENCHMARK(BM_DGammaNorm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RoughIntegralTable(benchmark::State& st) {
  const Lattice lat{12};
  const IndexRange r{lat.index(0.0), lat.index(1.0)};
  Weierstrass W(0.6, default_terms(lat), 1);
  PathSamples path{lat, r.first, {{}}};
  for (long i = r.first; i <= r.last; ++i) path.components[0].push_back(W.centered(lat.point(i)));
  auto X = std::make_shared<const BranchedRoughPath>(lift_path(path, 0.4));
  const SmoothFunction g{[](int k, double x) { return k % 2 ? std::cos(x) * (k % 4 == 1 ? 1 : -1)
                                                            : std::sin(x) * (k % 4 == 0 ? 1 : -1); }, 8};
  const auto Z = controlled_function(*X, path, 1, g);
  for (auto _ : st)
    benchmark::DoNotOptimize(rough_integral_table(*X, Z, r.first, r.last, {4, 5, 6, 7, 8}, 12, 1, policy(st)).reference);
}
BENCHMARK(BM_RoughIntegralTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
