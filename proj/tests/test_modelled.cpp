#include "regrecon/modelled.hpp"
#include "regrecon/weierstrass.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace regrecon;

namespace {

std::shared_ptr<const HolderModel> holder(const Lattice& lat, double alpha, std::uint64_t seed) {
  auto W = std::make_shared<Weierstrass>(alpha, default_terms(lat), seed);
  return std::make_shared<const HolderModel>(alpha, 1.0, nullptr,
                                             [W](double t) { return W->centered(t); }, lat,
                                             IndexRange{lat.index(-1.0), lat.index(2.0)});
}

Vec tau_vec(const ContinuousModel& Z) {
  Vec e = Vec::Zero(Z.structure().dim());
  e[1] = 1;
  return e;
}

// Σ_ζ [ max_x |f(x)|_ζ + max_{0<|y-x|<1} |f(y) - Γ_{y,x} f(x)|_ζ / |y-x|^{γ-ζ} ]
double brute_force_norm(const ModelledDistribution& f, double gamma, IndexRange xs) {
  const auto& T = f.model().structure();
  const Lattice& lat = f.lattice();
  double total = 0;
  for (double z : T.levels_below(gamma)) {
    double sup = 0, trans = 0;
    for (long x = xs.first; x <= xs.last; ++x) {
      sup = std::max(sup, T.level_norm(f.at(x), z));
      for (long y = f.range().first; y <= f.range().last; ++y) {
        const double h = std::abs(lat.point(y) - lat.point(x));
        if (h == 0 || h >= 1) continue;
        const Vec d = f.at(y) - f.model().gamma(lat.point(y), lat.point(x)) * f.at(x);
        trans = std::max(trans, T.level_norm(d, z) / std::pow(h, gamma - z));
      }
    }
    total += sup + trans;
  }
  return total;
}

}  // namespace

TEST_CASE("dgamma norm at p = q = inf equals the brute-force double loop") {
  const Lattice lat{8};
  const IndexRange unit{lat.index(0.0), lat.index(1.0)};
  for (std::uint64_t seed : {1u, 2u}) {
    auto core = holder(lat, 0.6, seed);
    auto ext = std::make_shared<const StarExtendedModel>(core, 1.0);
    const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.3, 2), tau_vec(*core), ext, lat, unit);
    const auto pairs = make_pair_sample(lat, unit, 1, 0);
    const double fast = dgamma_norm(f, 1.0, kInf, kInf, pairs).total;
    CHECK(std::abs(fast - brute_force_norm(f, 1.0, unit)) <= 1e-10);
  }
}

TEST_CASE("dgamma: triangle inequality on random pairs (seeded)") {
  const Lattice lat{9};
  const IndexRange unit{lat.index(0.0), lat.index(1.0)};
  auto core = holder(lat, 0.6, 3);
  auto ext = std::make_shared<const StarExtendedModel>(core, 1.0);
  const auto pairs = make_pair_sample(lat, unit, 8, 8);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(0.2, 0.8), r(0.1, 0.4);
  for (int trial = 0; trial < 8; ++trial) {
    const auto f = elementary_md(c(rng), profile_function(make_bump(3), c(rng), r(rng), 2), tau_vec(*core), ext, lat, unit);
    const auto g = elementary_md(c(rng), profile_function(make_bump(3), c(rng), r(rng), 2), tau_vec(*core), ext, lat, unit);
    for (double p : {2.0, kInf}) {
      const double a = dgamma_norm(f, 1.0, p, p, pairs).total, b = dgamma_norm(g, 1.0, p, p, pairs).total;
      CHECK(dgamma_norm(f + g, 1.0, p, p, pairs).total <= a + b + 1e-12);
      CHECK(dgamma_distance(f, g, 1.0, p, p, pairs).total == doctest::Approx(dgamma_norm(f - g, 1.0, p, p, pairs).total));
    }
  }
}

TEST_CASE("dgamma: serial and parallel agree exactly") {
  const Lattice lat{10};
  const IndexRange unit{lat.index(0.0), lat.index(1.0)};
  auto core = holder(lat, 0.6, 4);
  auto ext = std::make_shared<const StarExtendedModel>(core, 1.0);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(*core), ext, lat, unit);
  const auto pairs = make_pair_sample(lat, unit, 16, 16);
  CHECK(dgamma_norm(f, 0.95, 2, 3, pairs, Exec::serial).total == dgamma_norm(f, 0.95, 2, 3, pairs, Exec::parallel).total);
}

TEST_CASE("elementary modelled distributions: translation identity") {
  // f(x) - Γ_{x,y} f(y) = (Φ(x) - Γ_{x,y} Φ(y)) ⋆ Γ_{x,z} τ, which vanishes when φ is constant
  const Lattice lat{9};
  const IndexRange unit{lat.index(0.0), lat.index(1.0)};
  auto core = holder(lat, 0.6, 5);
  auto ext = std::make_shared<const StarExtendedModel>(core, 1.0);
  const auto f = elementary_md(0.5, polynomial_function({2.0}), tau_vec(*core), ext, lat, unit);
  for (long x = unit.first; x <= unit.last; x += 37)
    for (long y = unit.first; y <= unit.last; y += 41)
      CHECK((f.at(x) - ext->gamma(lat.point(x), lat.point(y)) * f.at(y)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("density approximant: a Γ-flat f is reproduced") {
  const Lattice lat{10};
  const IndexRange r{lat.index(-1.0), lat.index(2.0)};
  auto core = holder(lat, 0.6, 6);
  auto ext = std::make_shared<const StarExtendedModel>(core, 1.0);
  const auto f = constant_md(0.5, ext->from_core(tau_vec(*core)), ext, lat, r, 1.0);
  for (int n = 1; n <= 4; ++n) {
    const auto fn = density_approximant(f, n, ext);
    double worst = 0;
    for (long i = fn.range().first; i <= fn.range().last; i += 7)
      worst = std::max(worst, (fn.at(i) - f.at(i)).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("density approximant is linear and converges pointwise") {
  const Lattice lat{11};
  const IndexRange r{lat.index(-1.0), lat.index(2.0)}, unit{lat.index(0.0), lat.index(1.0)};
  auto core = holder(lat, 0.6, 7);
  auto ext = std::make_shared<const StarExtendedModel>(core, 1.0);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(*core), ext, lat, r);
  const auto a = density_approximant(2.5 * f, 3, ext), b = density_approximant(f, 3, ext);
  for (long i = unit.first; i <= unit.last; i += 13) CHECK((a.at(i) - 2.5 * b.at(i)).cwiseAbs().maxCoeff() < 1e-13);
  double prev = 1e300;
  std::vector<double> errs;
  for (int n : {2, 4, 6}) {
    const auto fn = density_approximant(f, n, ext);
    double worst = 0;
    for (long i = unit.first; i <= unit.last; ++i) worst = std::max(worst, std::abs(fn.at(i)[1] - f.at(i)[1]));
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK_THROWS_AS(density_approximant(f, lat.level - 1, ext), std::invalid_argument);
}
