#include "regrecon/rough_path.hpp"
#include "regrecon/weierstrass.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace regrecon;

namespace {

PathSamples sampled(const Lattice& lat, double lo, double hi,
                    std::vector<std::function<double(double)>> comps) {
  PathSamples p{lat, lat.index(lo), std::vector<std::vector<double>>(comps.size())};
  for (std::size_t j = 0; j < comps.size(); ++j)
    for (long i = lat.index(lo); i <= lat.index(hi); ++i) p.components[j].push_back(comps[j](lat.point(i)));
  return p;
}

PathSamples weierstrass_path(const Lattice& lat, double alpha, std::uint64_t seed, double lo = 0, double hi = 1) {
  auto W = std::make_shared<Weierstrass>(alpha, default_terms(lat), seed);
  return sampled(lat, lo, hi, {[W](double t) { return W->centered(t); }});
}

// τ! for the trees of the one-letter algebra
double tree_factorial(const hopf::Tree& t) {
  double f = t.node_count();
  for (const auto& c : t.children()) f *= tree_factorial(c);
  return f;
}

const SmoothFunction kSin{[](int k, double x) {
                            switch (k % 4) {
                              case 0: return std::sin(x);
                              case 1: return std::cos(x);
                              case 2: return -std::sin(x);
                              default: return -std::cos(x);
                            }
                          },
                          8};
const SmoothFunction kIdentity{[](int k, double x) { return k == 0 ? x : k == 1 ? 1.0 : 0.0; }, 8};

}  // namespace

TEST_CASE("truncation level") {
  CHECK(truncation_for(0.6) == 1);
  CHECK(truncation_for(0.4) == 2);
  CHECK(truncation_for(0.3) == 3);
  CHECK_THROWS(truncation_for(0.5));
  CHECK_THROWS(truncation_for(0.2));
}

TEST_CASE("lift of a straight line: ⟨X_{s,t}, τ⟩ = (t - s)^{|τ|} / τ!") {
  const Lattice lat{8};
  const auto path = sampled(lat, 0, 1, {[](double t) { return t; }});
  const auto X = lift_path(path, 0.3);
  REQUIRE(X.N() == 3);
  const auto& alg = *X.algebra();
  for (auto [s, t] : {std::pair{0L, 256L}, {32L, 96L}, {200L, 201L}}) {
    const auto inc = X.increment(s, t);
    const double h = lat.point(t) - lat.point(s);
    for (std::size_t k = 0; k < alg.trees().size(); ++k) {
      const auto& tree = alg.trees()[k];
      CHECK(inc[static_cast<int>(k)] == doctest::Approx(std::pow(h, tree.node_count()) / tree_factorial(tree)).epsilon(1e-12));
    }
  }
}

TEST_CASE("lift of a two-dimensional line: iterated integrals") {
  const Lattice lat{8};
  const auto path = sampled(lat, 0, 1, {[](double t) { return t; }, [](double t) { return -2 * t; }});
  const auto X = lift_path(path, 0.4);
  const auto inc = X.increment(0, 128);
  const double h = 0.5;
  CHECK(inc.value(hopf::parse_forest("[•1]2")) == doctest::Approx(-2 * h * h / 2));
  CHECK(inc.value(hopf::parse_forest("•1·•2")) == doctest::Approx(-2 * h * h));
}

TEST_CASE("Chen's relation and the independent recursion (seeded)") {
  const Lattice lat{9};
  for (std::uint64_t seed : {1u, 2u}) {
    auto W = std::make_shared<Weierstrass>(0.4, default_terms(lat), seed);
    auto V = std::make_shared<Weierstrass>(0.4, default_terms(lat), seed + 100);
    const auto path = sampled(lat, 0, 1, {[W](double t) { return W->centered(t); }, [V](double t) { return V->centered(t); }});
    const auto X = lift_path(path, 0.4);
    const auto r = chen_check(X, path, 60, seed);
    CHECK(r.chen <= 1e-10);
    CHECK(r.independent <= 1e-10);
  }
}

TEST_CASE("path CSV round-trips") {
  const Lattice lat{7};
  const auto p = weierstrass_path(lat, 0.6, 3);
  std::stringstream ss;
  write_path_csv(ss, p);
  const auto q = read_path_csv(ss, lat);
  CHECK(q.first == p.first);
  REQUIRE(q.components.size() == 1);
  for (long i = 0; i < p.size(); ++i) CHECK(q.components[0][i] == p.components[0][i]);
}

TEST_CASE("rough integral of X dX along a line is exact at every mesh") {
  const Lattice lat{10};
  const auto path = sampled(lat, 0, 1, {[](double t) { return t; }});
  const auto X = lift_path(path, 0.4);
  const auto Z = controlled_function(X, path, 1, kIdentity);
  for (int n = 0; n <= 10; ++n) CHECK(std::abs(rough_integral(X, Z, 0, 1024, n, 1) - 0.5) <= 1e-12);
}

TEST_CASE("rough integral is additive over split intervals") {
  const Lattice lat{10};
  const auto path = weierstrass_path(lat, 0.6, 4);
  const auto X = lift_path(path, 0.6);
  const auto Z = controlled_function(X, path, 1, kSin);
  for (int n : {3, 5, 8})
    CHECK(std::abs(rough_integral(X, Z, 0, 512, n, 1) + rough_integral(X, Z, 512, 1024, n, 1) -
                   rough_integral(X, Z, 0, 1024, n, 1)) <= 1e-12);
}

TEST_CASE("controlled functions of a line have no remainder beyond truncation") {
  const Lattice lat{9};
  const auto path = sampled(lat, 0, 1, {[](double t) { return t; }});
  const auto X = lift_path(path, 0.4);
  const auto Z = controlled_function(X, path, 1, kIdentity);
  const auto pairs = make_pair_sample(lat, {0, 512}, 16, 8);
  // g(x) = x is controlled exactly: Z_t = X_s + h, Z'_t = 1
  CHECK(controlled_norm(Z, X, pairs).remainder <= 1e-12);
  CHECK_THROWS(ControlledPath(X.algebra(), lat, 0, 4).set(0, X.algebra()->forest_index(hopf::parse_forest("[•1]1")), 1.0));
}

TEST_CASE("rough path model satisfies the model identities") {
  const Lattice lat{9};
  const auto path = weierstrass_path(lat, 0.4, 5);
  auto X = std::make_shared<const BranchedRoughPath>(lift_path(path, 0.4));
  const auto model = rp_to_model(X);
  CHECK(check_algebraic(*model, lat, X->range(), 80, 5).max() <= 1e-10);
}

TEST_CASE("integral table: serial and parallel agree exactly") {
  const Lattice lat{11};
  const auto path = weierstrass_path(lat, 0.6, 6);
  const auto X = lift_path(path, 0.6);
  const auto Z = controlled_function(X, path, 1, kSin);
  const auto a = rough_integral_table(X, Z, 0, 2048, {3, 4, 5, 6}, 11, 1, Exec::serial);
  const auto b = rough_integral_table(X, Z, 0, 2048, {3, 4, 5, 6}, 11, 1, Exec::parallel);
  CHECK(a.values == b.values);
  CHECK(a.reference == b.reference);
}

TEST_CASE("mollified rough path of a line is the line") {
  const Lattice lat{10};
  const auto path = sampled(lat, -1, 2, {[](double t) { return 3 * t; }});
  auto X = std::make_shared<const BranchedRoughPath>(lift_path(path, 0.4));
  const auto Xl = mollify_rough_path(X, DiscreteMollifier(3, 0.0625, lat));
  const auto r = Xl.range();
  for (long s = r.first; s + 50 <= r.last; s += 97) {
    const auto a = Xl.increment(s, s + 50), b = X->increment(s, s + 50);
    for (std::size_t k = 0; k < a.tree_values().size(); ++k)
      CHECK(a.tree_values()[k] == doctest::Approx(b.tree_values()[k]).epsilon(1e-10));
  }
}

TEST_CASE("mollified rough path: Chen holds for N = 1") {
  const Lattice lat{10};
  const auto path = weierstrass_path(lat, 0.6, 7, -1, 2);
  auto X = std::make_shared<const BranchedRoughPath>(lift_path(path, 0.6));
  const auto Xl = mollify_rough_path(X, DiscreteMollifier(3, 0.03125, lat));
  CHECK(Xl.chen_residual(100, 7) <= 1e-8);
}

TEST_CASE("mollified controlled path: the two readings differ by Z") {
  const Lattice lat{10};
  const auto path = weierstrass_path(lat, 0.6, 8, -1, 2);
  auto X = std::make_shared<const BranchedRoughPath>(lift_path(path, 0.6));
  const auto Z = controlled_function(*X, path, 1, kSin);
  const DiscreteMollifier phi(3, 0.0625, lat);
  const auto a = mollify_controlled_path(Z, phi, false), b = mollify_controlled_path(Z, phi, true);
  for (long i = a.range().first; i <= a.range().last; i += 31) CHECK(b.path(i) - a.path(i) == doctest::Approx(Z.path(i)));
}
