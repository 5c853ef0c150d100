#include "regrecon/model.hpp"
#include "regrecon/weierstrass.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace regrecon;

namespace {

const Lattice kLat{10};
const IndexRange kBase{kLat.index(-1.0), kLat.index(2.0)};
const IndexRange kUnit{kLat.index(0.0), kLat.index(1.0)};

std::shared_ptr<const HolderModel> holder(double alpha, std::uint64_t seed, HolderModel::Fn f = nullptr) {
  auto W = std::make_shared<Weierstrass>(alpha, default_terms(kLat), seed);
  return std::make_shared<const HolderModel>(alpha, 1.0, std::move(f),
                                             [W](double t) { return W->centered(t); }, kLat, kBase);
}

}  // namespace

TEST_CASE("Weierstrass path is deterministic in the seed") {
  Weierstrass a(0.6, 8, 5), b(0.6, 8, 5), c(0.6, 8, 6);
  CHECK(a.phases() == b.phases());
  CHECK(a.phases() != c.phases());
  CHECK(a.centered(0.0) == 0.0);
  CHECK(a(0.3) == b(0.3));
}

TEST_CASE("Hölder model: Π_x Γ_{x,y} = Π_y and Γ composes") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto Z = holder(0.6, seed);
    const auto r = check_algebraic(*Z, kLat, kUnit, 100, seed);
    CHECK(r.pi < 1e-13);
    CHECK(r.gamma < 1e-13);
  }
  // with a non-constant f the identities still hold
  const auto Zf = holder(0.6, 4, [](double t) { return 2 + std::sin(t); });
  CHECK(check_algebraic(*Zf, kLat, kUnit, 100, 4).max() < 1e-13);
}

TEST_CASE("Hölder model Γ direction") {
  const auto Z = holder(0.6, 1);
  const double x = 0.25, y = 0.75;
  const Mat G = Z->gamma(x, y);
  // Γ_{x,y} τ = τ + (h(x) - h(y)) 1
  CHECK(G(0, 1) == doctest::Approx(Z->h(x) - Z->h(y)));
  CHECK(Z->pi(x, 1, y) == doctest::Approx(Z->h(y) - Z->h(x)));
}

TEST_CASE("a corrupted Γ is detected") {
  auto Z = holder(0.6, 1);
  const CorruptedModel bad(Z, 0, 1, 1e-3);
  CHECK(check_algebraic(bad, kLat, kUnit, 50, 1).max() > 1e-4);
}

TEST_CASE("polynomial model is exact") {
  const auto T = polynomial_structure(Scaling::euclidean(1), 3.0);
  const auto P = polynomial_model(T);
  CHECK(check_algebraic(*P, kLat, kUnit, 100, 9).max() < 1e-12);
  CHECK(P->pi(0.5, 2, 0.75) == doctest::Approx(0.0625));
}

TEST_CASE("Γ seminorm of the Hölder model equals the Hölder quotient of h") {
  const auto Z = holder(0.6, 2);
  const auto pairs = make_pair_sample(kLat, kUnit, 16, 8);
  const auto g = estimate_gamma_seminorm(*Z, nullptr, 1.0, 0.0, pairs);
  const auto h = sample(kLat, kBase, [&](double t) { return Z->h(t); });
  CHECK(g.gamma_norm == doctest::Approx(holder_constant(h, 0.6, pairs)).epsilon(1e-12));
}

TEST_CASE("Π seminorm of a monomial is scale invariant") {
  const auto T = polynomial_structure(Scaling::euclidean(1), 3.0);
  const auto P = polynomial_model(T);
  const ScaleFamily fam(kLat, make_test_family(2), {2, 3, 4, 5});
  const auto xs = strided({kLat.index(0.25), kLat.index(0.75)}, 64);
  const auto r = estimate_pi_seminorm(*P, nullptr, 3.0, 0.0, fam, xs);
  double lo = 1e300, hi = 0;
  for (const auto& c : r.pi_cells)
    if (c.level == 2.0) {
      lo = std::min(lo, c.ratio);
      hi = std::max(hi, c.ratio);
    }
  CHECK(hi > 0);
  CHECK(hi / lo == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("seminorm estimators: serial and parallel agree exactly") {
  const auto Z = holder(0.6, 3);
  const ScaleFamily fam(kLat, make_test_family(2), {1, 2, 3, 4, 5, 6});
  const auto xs = strided(kUnit, 32);
  const auto pairs = make_pair_sample(kLat, kUnit, 32, 16);
  const auto a = estimate_model_seminorm(*Z, 1.0, fam, xs, pairs, Exec::serial);
  const auto b = estimate_model_seminorm(*Z, 1.0, fam, xs, pairs, Exec::parallel);
  CHECK(a.pi_norm == b.pi_norm);
  CHECK(a.gamma_norm == b.gamma_norm);
  REQUIRE(a.pi_cells.size() == b.pi_cells.size());
  for (std::size_t i = 0; i < a.pi_cells.size(); ++i) CHECK(a.pi_cells[i].ratio == b.pi_cells[i].ratio);
}

TEST_CASE("weakened seminorm rejects eps beyond the level gap") {
  const auto Z = holder(0.6, 3);
  const ScaleFamily fam(kLat, make_test_family(2), {2, 3});
  const auto xs = strided(kUnit, 64);
  const auto pairs = make_pair_sample(kLat, kUnit, 64, 4);
  CHECK(admissible_eps_bound(Z->structure(), 1.0) == doctest::Approx(0.6));
  CHECK_THROWS_AS(weakened_seminorm(*Z, *Z, 1.0, 0.7, fam, xs, pairs), std::invalid_argument);
  CHECK(weakened_seminorm(*Z, *Z, 1.0, 0.1, fam, xs, pairs).total() == 0.0);
}

TEST_CASE("star extension: X^k ⋆ X^l ⋆ τ = X^{k+l} ⋆ τ") {
  const auto ext = std::make_shared<const StarExtendedModel>(holder(0.4, 1), 2.5);
  const auto& T = ext->structure();
  for (int tau = 0; tau < T.dim(); ++tau) {
    Vec e = Vec::Zero(T.dim());
    e[tau] = 1;
    for (int k = 0; k <= 2; ++k)
      for (int l = 0; l <= 2; ++l)
        CHECK((ext->star_monomial(k, ext->star_monomial(l, e)) - ext->star_monomial(k + l, e)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(check_algebraic(*ext, kLat, kUnit, 50, 2).max() < 1e-12);
}
