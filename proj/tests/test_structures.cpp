#include "regrecon/lattice.hpp"
#include "regrecon/structures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace regrecon;

TEST_CASE("polynomial structure: monomials and levels") {
  const auto T = polynomial_structure(Scaling::euclidean(1), 3.0);
  CHECK(T.dim() == 3);
  CHECK(T.levels() == std::vector<double>{0, 1, 2});
  CHECK(T.satisfies_polynomial_assumption());
  const std::vector<int> k2{2};
  CHECK(T.monomial_index(k2) == 2);
  // parabolic scaling in 1+1: degrees 0, 1, 2, 2, ... below 3
  CHECK(monomials_below(Scaling({2, 1}), 3.0).size() == 4);
}

TEST_CASE("holder structure has levels 0 and alpha") {
  const auto T = holder_structure(0.6, 1.0);
  CHECK(T.levels() == std::vector<double>{0, 0.6});
  CHECK(T.unit_index() == 0);
  CHECK_FALSE(T.is_polynomial(1));
}

TEST_CASE("polynomial Γ composes and is graded unipotent") {
  const auto T = polynomial_structure(Scaling::euclidean(1), 4.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng), y = u(rng), z = u(rng);
    CHECK((poly_gamma(T, x, y) * poly_gamma(T, y, z) - poly_gamma(T, x, z)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(is_graded_unipotent(T, poly_gamma(T, x, y)));
  }
}

TEST_CASE("profiles: exact integral against the trapezoid rule") {
  const auto p = mollifier_profile(3);
  CHECK(p.integral() == doctest::Approx(1.0).epsilon(1e-14));
  const int n = 4096;
  double acc = 0;
  for (int i = 0; i <= n; ++i) acc += p(-1.0 + 2.0 * i / n) * (i == 0 || i == n ? 0.5 : 1.0);
  CHECK(acc * 2.0 / n == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("test family lies in the unit ball of C^r") {
  for (const auto& p : make_test_family(2))
    for (int m = 0; m <= 2; ++m) CHECK(p.differentiated(m).sup_abs() <= 1.0 + 1e-12);
}

TEST_CASE("partition of unity sums to one with vanishing derivatives (seeded)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 0; n <= 6; ++n) {
    const PartitionOfUnity part(n);
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng);
      double s0 = 0, s1 = 0, s2 = 0;
      for (long k : part.active(x)) {
        s0 += part.derivative(0, k, x);
        s1 += part.derivative(1, k, x);
        s2 += part.derivative(2, k, x);
        CHECK(std::abs(x - k * part.spacing()) <= part.support_radius() * part.spacing());
      }
      CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(s1) < 1e-9 * std::ldexp(1.0, n));
      CHECK(std::abs(s2) < 1e-7 * std::ldexp(1.0, 2 * n));
    }
  }
}

TEST_CASE("lattice indexing") {
  const Lattice lat{10};
  CHECK(lat.index(0.5) == 512);
  CHECK(lat.steps(3) == 128);
  CHECK_THROWS(lat.index(0.1));
  CHECK_THROWS(lat.steps(11));
}

TEST_CASE("pairing weights integrate constants and are symmetric") {
  const auto p = make_bump(2);
  for (long m : {4L, 16L, 64L}) {
    const auto w = pairing_weights(p, m);
    double s = 0;
    for (double v : w) s += v;
    CHECK(s == doctest::Approx(p.integral()).epsilon(1e-3));
    for (long o = 0; o <= m; ++o) CHECK(w[m + o] == doctest::Approx(w[m - o]));
  }
}

TEST_CASE("structure descriptor round-trips") {
  const StructureDescriptor d{holder_structure(0.4, 1.5), 2};
  std::stringstream ss;
  save_structure(ss, d);
  const auto back = load_structure(ss);
  CHECK(back.r == 2);
  REQUIRE(back.structure.dim() == d.structure.dim());
  for (int i = 0; i < d.structure.dim(); ++i) {
    CHECK(back.structure.basis(i).label == d.structure.basis(i).label);
    CHECK(back.structure.level(i) == doctest::Approx(d.structure.level(i)));
  }
}

TEST_CASE("partition derivatives scale like 2^{n|m|} with a constant independent of n") {
  std::vector<double> c1, c2;
  for (int n = 0; n <= 6; ++n) {
    const PartitionOfUnity part(n);
    double m1 = 0, m2 = 0;
    const double h = part.spacing();
    for (int i = -400; i <= 400; ++i) {
      const double x = i * h * part.support_radius() / 400;
      m1 = std::max(m1, std::abs(part.derivative(1, 0, x)));
      m2 = std::max(m2, std::abs(part.derivative(2, 0, x)));
    }
    c1.push_back(m1 / std::ldexp(1.0, n));
    c2.push_back(m2 / std::ldexp(1.0, 2 * n));
  }
  for (std::size_t n = 1; n < c1.size(); ++n) {
    CHECK(c1[n] == doctest::Approx(c1[0]).epsilon(1e-9));
    CHECK(c2[n] == doctest::Approx(c2[0]).epsilon(1e-9));
  }
  CHECK(c1[0] > 0);
}
