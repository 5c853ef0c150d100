// Regularity-structure metadata, graded maps, test functions and dyadic grids.
#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace regrecon {

// Upper bound on dim T; vectors and matrices of this size live on the stack.
inline constexpr int kMaxDim = 48;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim,
                          kMaxDim>;

class Scaling {
 public:
  explicit Scaling(std::vector<int> s);
  static Scaling euclidean(int d) { return Scaling(std::vector<int>(d, 1)); }

  int dim() const { return static_cast<int>(s_.size()); }
  int total() const { return total_; }
  int operator[](int i) const { return s_[i]; }
  const std::vector<int>& values() const { return s_; }
  // max_i |x_i|^{1/s_i}
  double norm(std::span<const double> x) const;
  int degree(std::span<const int> k) const;

 private:
  std::vector<int> s_;
  int total_ = 0;
};

bool is_integer_level(double z);

struct BasisElement {
  std::string label;
  double level = 0;
  std::optional<std::vector<int>> monomial;  // set iff the element is X^k
};

class RegStructure {
 public:
  RegStructure(std::vector<BasisElement> basis, double gamma, Scaling scaling);

  int dim() const { return static_cast<int>(basis_.size()); }
  const BasisElement& basis(int i) const { return basis_[i]; }
  const std::vector<BasisElement>& basis() const { return basis_; }
  double level(int i) const { return basis_[i].level; }
  double gamma() const { return gamma_; }
  const Scaling& scaling() const { return scaling_; }
  // Sorted distinct homogeneities A.
  const std::vector<double>& levels() const { return levels_; }
  std::vector<double> levels_below(double gamma) const;
  const std::vector<int>& indices_at(double level) const;
  double min_level() const { return levels_.front(); }
  bool is_polynomial(int i) const { return basis_[i].monomial.has_value(); }
  int monomial_index(std::span<const int> k) const;  // -1 if absent
  int unit_index() const;                            // index of X^0
  // Integer levels carry exactly the monomials of that scaled degree, and all
  // monomials of degree < gamma are present.
  bool satisfies_polynomial_assumption() const;
  // max over the basis elements of level z of |v_i|
  double level_norm(const Vec& v, double z) const;

 private:
  std::vector<BasisElement> basis_;
  double gamma_;
  Scaling scaling_;
  std::vector<double> levels_;
  std::vector<std::vector<int>> by_level_;
};

// Multi-indices k with |k|_s < gamma, by increasing degree.
std::vector<std::vector<int>> monomials_below(const Scaling& s, double gamma);
RegStructure polynomial_structure(const Scaling& s, double gamma);
// The two-level structure A = {0, α}, T = span{1, τ}.
RegStructure holder_structure(double alpha, double gamma);

// Graded unipotent check: identity on diagonal blocks, zero above.
bool is_graded_unipotent(const RegStructure& T, const Mat& M, double tol = 1e-12);
// Γ_{x,y} on the polynomial sector of T (other columns are identity).
Mat poly_gamma(const RegStructure& T, std::span<const double> x, std::span<const double> y);
Mat poly_gamma(const RegStructure& T, double x, double y);

// A polynomial profile on [-1, 1], zero outside.
class PolyProfile {
 public:
  PolyProfile() = default;
  explicit PolyProfile(std::vector<double> coef) : coef_(std::move(coef)) {}

  double operator()(double y) const { return derivative(0, y); }
  double derivative(int m, double y) const;
  PolyProfile differentiated(int m = 1) const;
  PolyProfile scaled(double c) const;
  double integral() const;  // exact
  double sup_abs() const;   // sup over [-1, 1], located by bisection on the derivative
  const std::vector<double>& coefficients() const { return coef_; }

 private:
  std::vector<double> coef_;
};

// (1 - y^2)^{r+1}, scaled so derivatives of order <= r have sup norm <= 1.
PolyProfile make_bump(int r);
// The bump and its first r derivatives, each rescaled into the unit ball of C^r.
std::vector<PolyProfile> make_test_family(int r);
// (1 - y^2)^{r+1} normalized to unit integral.
PolyProfile mollifier_profile(int r);

// η^δ_x(y) = δ^{-|s|} η((y - x)/δ^s) with η(u) = p(|u|), p a radial profile.
struct TestFunction {
  const PolyProfile* profile;
  std::vector<double> center;
  double delta;
  Scaling scaling;
  double operator()(std::span<const double> y) const;
};

class DyadicGrid {
 public:
  DyadicGrid(int level, Scaling s, std::vector<double> lo, std::vector<double> hi);
  int level() const { return level_; }
  double spacing(int axis) const;
  std::vector<std::vector<double>> points() const;
  bool contains(std::span<const double> x) const;

 private:
  int level_;
  Scaling s_;
  std::vector<double> lo_, hi_;
};

// Normalized shifted bumps: 1^n_k(x) = B(2^n x - k) / Σ_k' B(2^n x - k'),
// B(u) = (1 - u^2)^{b} on |u| < 1. Tensor products in higher dimension.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(int n, int b = 4);

  int level() const { return n_; }
  double spacing() const;
  // Support radius of 1^n_k around k·spacing, in units of the spacing.
  double support_radius() const { return 1.0; }
  // m-th x-derivative of 1^n_k at x, m <= 2.
  double derivative(int m, long k, double x) const;
  double operator()(long k, double x) const { return derivative(0, k, x); }
  // Grid indices k with 1^n_k(x) possibly nonzero.
  std::vector<long> active(double x) const;
  double value(std::span<const long> k, std::span<const double> x, const Scaling& s) const;

 private:
  int n_;
  PolyProfile B_;
};

// Structure descriptor files (INI): d, scaling, levels, sector dims, labels,
// monomials, gamma, r.
struct StructureDescriptor {
  RegStructure structure;
  int r;
};
StructureDescriptor load_structure(std::istream& in);
void save_structure(std::ostream& out, const StructureDescriptor& desc);

}  // namespace regrecon
