#include "regrecon/reconstruct.hpp"
#include "regrecon/weierstrass.hpp"

#include <doctest.h>

#include <cmath>

using namespace regrecon;

namespace {

const Lattice kLat{10};
const IndexRange kBase{kLat.index(-1.0), kLat.index(2.0)};
const IndexRange kUnit{kLat.index(0.0), kLat.index(1.0)};

std::shared_ptr<const HolderModel> holder(double gamma = 1.0, std::uint64_t seed = 1) {
  auto W = std::make_shared<Weierstrass>(0.6, default_terms(kLat), seed);
  return std::make_shared<const HolderModel>(0.6, gamma, nullptr,
                                             [W](double t) { return W->centered(t); }, kLat, kBase);
}

Vec tau_vec(int dim) {
  Vec e = Vec::Zero(dim);
  e[1] = 1;
  return e;
}

}  // namespace

TEST_CASE("reconstruction of a constant is Π_z τ") {
  auto Z = holder();
  const auto f = constant_md(0.5, tau_vec(2), Z, kLat, kUnit, 1.0);
  const auto F = reconstruct(f);
  for (long i = kUnit.first; i <= kUnit.last; ++i) CHECK(F.at(i) == doctest::Approx(Z->pi(0.5, 1, kLat.point(i))).epsilon(1e-12));
}

TEST_CASE("reconstruction of an elementary distribution is φ Π_z τ") {
  auto Z = holder();
  auto ext = std::make_shared<const StarExtendedModel>(Z, 1.0);
  const auto phi = profile_function(make_bump(3), 0.4, 0.3, 2);
  const auto f = elementary_md(0.4, phi, tau_vec(2), ext, kLat, kUnit);
  const auto F = reconstruct(f);
  for (long i = kUnit.first; i <= kUnit.last; ++i) {
    const double y = kLat.point(i);
    CHECK(std::abs(F.at(i) - phi(y) * Z->pi(0.4, 1, y)) <= 1e-12);
  }
}

TEST_CASE("reconstruction bound: a constant pairs to zero at every scale") {
  auto Z = holder();
  const auto f = constant_md(0.5, tau_vec(2), Z, kLat, kBase, 1.0);
  const ScaleFamily fam(kLat, make_test_family(2), int_range(2, 7));
  const auto rep = recon_bound(f, 1.0, fam, strided(kUnit, 16));
  for (double v : rep.sup_pairing) CHECK(v <= 1e-12);
}

TEST_CASE("reconstruction bound decays at rate γ for an elementary distribution") {
  auto Z = holder(0.6);
  auto ext = std::make_shared<const StarExtendedModel>(Z, 0.6);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(2), ext, kLat, kBase);
  const ScaleFamily fam(kLat, make_test_family(2), int_range(2, 7));
  const auto rep = recon_bound(f, 0.6, fam, strided(kUnit, 16));
  CHECK(rep.fit.slope >= 0.5);
  CHECK_THROWS_AS(recon_bound(f, 0.6, fam, std::vector<long>{kBase.first}), std::out_of_range);
}

TEST_CASE("reconstruction bound: serial and parallel agree exactly") {
  auto Z = holder(0.6);
  auto ext = std::make_shared<const StarExtendedModel>(Z, 0.6);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(2), ext, kLat, kBase);
  const ScaleFamily fam(kLat, make_test_family(2), int_range(2, 6));
  const auto xs = strided(kUnit, 32);
  const auto a = recon_bound(f, 0.6, fam, xs, kInf, kInf, 0, Exec::serial);
  const auto b = recon_bound(f, 0.6, fam, xs, kInf, kInf, 0, Exec::parallel);
  CHECK(a.sup_pairing == b.sup_pairing);
  CHECK(a.composite == b.composite);
}

TEST_CASE("two-model bound vanishes for identical inputs") {
  auto Z = holder(0.6);
  auto ext = std::make_shared<const StarExtendedModel>(Z, 0.6);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(2), ext, kLat, kBase);
  const ScaleFamily fam(kLat, make_test_family(2), int_range(2, 6));
  const auto rep = recon_two_model_bound(f, f, 0.6, fam, strided(kUnit, 32));
  for (double v : rep.sup_pairing) CHECK(v == 0.0);
}

TEST_CASE("local averages: Γ-flat inputs are exactly consistent") {
  auto Z = holder(0.7);
  const auto f = constant_md(0.5, tau_vec(2), Z, kLat, kBase, 0.7);
  const auto avg = average_consistency(f, 1, 6, 0.7, kInf, kInf);
  for (double v : avg.report.values) CHECK(v <= 1e-12);
  // averages of a constant are the constant
  const auto la = local_averages(f, 3);
  for (long k = la.k_first; la.has(k); ++k) CHECK((la.at(k) - f.at(kLat.index(std::ldexp(double(k), -3)))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("average bounds decay for an elementary distribution") {
  auto Z = holder(0.7);
  auto ext = std::make_shared<const StarExtendedModel>(Z, 0.7);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(2), ext, kLat, kBase);
  const auto avg = average_consistency(f, 1, 7, 0.7, kInf, kInf);
  CHECK(avg.report.fit.slope < 0);
  CHECK(std::isfinite(avg.q_statistic));
}

TEST_CASE("start level puts B_δ(x) inside the partition support") {
  for (int j = 1; j <= 10; ++j) {
    const double delta = std::ldexp(1.0, -j);
    const auto s = choose_n0(delta);
    const double cell = std::ldexp(1.0, -s.n0);
    CHECK(0.5 * cell + delta <= cell);
    CHECK(s.n0 <= j);
  }
}

TEST_CASE("telescoping decomposition re-sums to F - Π_x f(x)") {
  auto Z = holder(0.6);
  auto ext = std::make_shared<const StarExtendedModel>(Z, 0.6);
  const auto f = elementary_md(0.5, profile_function(make_bump(3), 0.5, 0.25, 2), tau_vec(2), ext, kLat, kBase);
  std::vector<long> ys;
  for (long y = kLat.index(0.375); y <= kLat.index(0.625); y += 8) ys.push_back(y);
  CHECK(telescoping_residual(f, kLat.index(0.5), ys, 2, 6) <= 1e-10);
}
