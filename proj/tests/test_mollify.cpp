#include "regrecon/mollify.hpp"
#include "regrecon/weierstrass.hpp"

#include <doctest.h>

#include <cmath>

using namespace regrecon;

namespace {

const Lattice kLat{10};
const IndexRange kBase{kLat.index(-1.0), kLat.index(2.0)};
const IndexRange kWindow{kLat.index(-0.5), kLat.index(1.5)};
const IndexRange kUnit{kLat.index(0.0), kLat.index(1.0)};

std::shared_ptr<const HolderModel> holder(std::uint64_t seed = 1) {
  auto W = std::make_shared<Weierstrass>(0.6, default_terms(kLat), seed);
  return std::make_shared<const HolderModel>(0.6, 1.0, nullptr,
                                             [W](double t) { return W->centered(t); }, kLat, kBase);
}

MollifyStudySetup setup(Exec exec = Exec::parallel) {
  ScaleFamily fam(kLat, make_test_family(2), int_range(1, 8));
  return MollifyStudySetup{fam, strided(kUnit, 32), make_pair_sample(kLat, kUnit, 32, 16), kWindow, 3, exec};
}

}  // namespace

TEST_CASE("mollifier weights: unit mass and exact derivative moments") {
  for (double l : {0.25, 0.0625, 1.0 / 128}) {
    const DiscreteMollifier phi(3, l, kLat);
    const long m = phi.half_width();
    for (int k = 0; k <= 3; ++k) {
      const auto& w = phi.weights(k);
      double moment = 0, fact = 1;
      for (int i = 1; i <= k; ++i) fact *= i;
      for (long o = -m; o <= m; ++o) moment += w[o + m] * std::pow(-o * kLat.step(), k) / fact;
      CHECK(moment == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS(DiscreteMollifier(3, std::ldexp(1.0, -9), kLat));  // fewer than 4 lattice steps
}

TEST_CASE("mollification reproduces affine functions") {
  const DiscreteMollifier phi(3, 0.125, kLat);
  const auto g = sample(kLat, kBase, [](double t) { return 3 * t - 1; });
  const auto c0 = phi.convolve(g, 0), c1 = phi.convolve(g, 1);
  for (long i = c0.range().first; i <= c0.range().last; i += 17) {
    CHECK(c0.at(i) == doctest::Approx(3 * kLat.point(i) - 1).epsilon(1e-12));
    CHECK(c1.at(i) == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("mollified Hölder model satisfies the model identities") {
  const MollifiedModel M(holder(), DiscreteMollifier(3, 0.0625, kLat), kWindow);
  const auto r = check_algebraic(M, kLat, kUnit, 200, 5);
  CHECK(r.pi <= 1e-6);
  CHECK(r.gamma <= 1e-10);
}

TEST_CASE("mollified polynomial model stays canonical") {
  const auto T = polynomial_structure(Scaling::euclidean(1), 2.5);
  const MollifiedModel M(polynomial_model(T), DiscreteMollifier(3, 0.125, kLat), kWindow);
  for (double x : {0.0, 0.25, 0.5})
    for (double y : {0.125, 0.5, 0.875})
      for (int k = 0; k < 3; ++k) CHECK(M.pi(x, k, y) == doctest::Approx(std::pow(y - x, k)).epsilon(1e-9));
}

TEST_CASE("mollified model: serial and parallel construction agree exactly") {
  const DiscreteMollifier phi(3, 0.125, kLat);
  const MollifiedModel a(holder(2), phi, kWindow, false, Exec::serial);
  const MollifiedModel b(holder(2), phi, kWindow, false, Exec::parallel);
  for (double x : {0.0, 0.3125, 0.75})
    for (double y : {0.0, 0.5, 1.0}) {
      CHECK(a.pi(x, 1, y) == b.pi(x, 1, y));
      CHECK((a.gamma(x, y) - b.gamma(x, y)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("norm bound holds with J and breaks without it") {
  const std::vector<double> lambdas{0.25, 0.125, 0.0625};
  const auto s = setup();
  CHECK(mollification_norm_bound(holder(), lambdas, 1.0, s).max_ratio() <= 10.0);
  CHECK(mollification_norm_bound(holder(), lambdas, 1.0, s, true).max_ratio() > 10.0);
}

TEST_CASE("weakened distance decays in lambda") {
  const auto rep = mollification_convergence(holder(), {0.25, 0.125, 0.0625, 0.03125}, 1.0, 0.1, setup());
  CHECK(rep.fit.slope > 0.05);
  CHECK(rep.values.back() < rep.values.front());
}

TEST_CASE("convergence study: serial and parallel agree exactly") {
  const std::vector<double> lambdas{0.25, 0.125, 0.0625};
  const auto a = mollification_convergence(holder(3), lambdas, 1.0, 0.1, setup(Exec::serial));
  const auto b = mollification_convergence(holder(3), lambdas, 1.0, 0.1, setup(Exec::parallel));
  CHECK(a.values == b.values);
}
