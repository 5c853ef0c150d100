// Continuous models (Π, Γ) on the line, their seminorm estimators and the
// algebraic-identity check.
#pragma once

#include "regrecon/lattice.hpp"
#include "regrecon/parallel.hpp"
#include "regrecon/structures.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace regrecon {

class ContinuousModel {
 public:
  virtual ~ContinuousModel() = default;

  virtual const RegStructure& structure() const = 0;
  // Π_x τ evaluated at y.
  virtual double pi(double x, int tau, double y) const = 0;
  // Γ_{x,y} as a matrix acting on coefficient vectors.
  virtual Mat gamma(double x, double y) const = 0;
  // (Π_x v)(y) at lattice points first, first + 1, ... of lat.
  virtual void pi_row(double x, const Vec& v, const Lattice& lat, long first,
                      std::span<double> out) const;
  // Whether Π_x X^k = (· - x)^k on the polynomial sector (the hypothesis under
  // which the model may be mollified).
  virtual bool canonical_on_polynomials() const { return false; }
  // Lattice window outside of which the model cannot be evaluated, if any.
  virtual std::optional<IndexRange> domain() const { return std::nullopt; }

  double pi(double x, const Vec& v, double y) const;
};

using ModelPtr = std::shared_ptr<const ContinuousModel>;

// Π_x X^k(y) = (y - x)^k on a one-dimensional polynomial structure.
class PolynomialModel final : public ContinuousModel {
 public:
  explicit PolynomialModel(RegStructure T);
  const RegStructure& structure() const override { return T_; }
  double pi(double x, int tau, double y) const override;
  Mat gamma(double x, double y) const override { return poly_gamma(T_, x, y); }
  bool canonical_on_polynomials() const override { return true; }

 private:
  RegStructure T_;
  std::vector<int> degree_;
};

ModelPtr polynomial_model(const RegStructure& T);

// Π_x 1 = f, Π_x τ = (h(·) - h(x)) f, Γ_{x,y} τ = τ + (h(x) - h(y)) 1.
class HolderModel final : public ContinuousModel {
 public:
  using Fn = std::function<double(double)>;
  // f == nullptr means f ≡ 1. Samples of f and h are cached on the window.
  HolderModel(double alpha, double gamma, Fn f, Fn h, Lattice lat, IndexRange window);

  const RegStructure& structure() const override { return T_; }
  double pi(double x, int tau, double y) const override;
  Mat gamma(double x, double y) const override;
  void pi_row(double x, const Vec& v, const Lattice& lat, long first,
              std::span<double> out) const override;
  bool canonical_on_polynomials() const override { return !f_; }

  double h(double x) const;
  double f(double x) const;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  RegStructure T_;
  Fn f_, h_;
  Lattice lat_;
  IndexRange window_;
  std::vector<double> fs_, hs_;
};

// Tensor extension by polynomials: basis X^k (k < γ) and X^k ⋆ σ for the
// non-polynomial core elements σ with k + |σ| < γ, with
// Π_x(X^k ⋆ σ)(y) = (y - x)^k Π_x σ(y) and Γ(X^k ⋆ σ) = ΓX^k ⋆ Γσ.
class StarExtendedModel final : public ContinuousModel {
 public:
  StarExtendedModel(ModelPtr core, double gamma);

  const RegStructure& structure() const override { return T_; }
  double pi(double x, int tau, double y) const override;
  Mat gamma(double x, double y) const override;
  void pi_row(double x, const Vec& v, const Lattice& lat, long first,
              std::span<double> out) const override;
  bool canonical_on_polynomials() const override { return core_->canonical_on_polynomials(); }
  std::optional<IndexRange> domain() const override { return core_->domain(); }

  const ContinuousModel& core() const { return *core_; }
  // Extended index of X^k ⋆ e_core (e_core polynomial or not), -1 if truncated.
  int product_index(int k, int core_index) const;
  // (k, core index) decomposition of an extended element; polynomials map to
  // (k, unit of the core).
  std::pair<int, int> factors(int i) const { return factors_[i]; }
  // X^k ⋆ v for an extended vector v, truncated at γ.
  Vec star_monomial(int k, const Vec& v) const;
  // Σ_k p_k X^k ⋆ v: p indexed by polynomial degree.
  Vec star(std::span<const double> p, const Vec& v) const;
  // Embeds a core vector (any level) into the extension, truncating at γ.
  Vec from_core(const Vec& v) const;

 private:
  ModelPtr core_;
  // filled while T_ is built, so declared before it
  std::vector<std::pair<int, int>> factors_;
  std::vector<int> core_poly_degree_;  // -1 for non-polynomial core elements
  RegStructure T_;
  int max_k_;
  std::vector<std::vector<int>> index_;  // [k][core] -> extended index or -1
};

// Adds `delta` to one off-diagonal entry of Γ_{x,y} for x != y.
class CorruptedModel final : public ContinuousModel {
 public:
  CorruptedModel(ModelPtr base, int row, int col, double delta);
  const RegStructure& structure() const override { return base_->structure(); }
  double pi(double x, int tau, double y) const override { return base_->pi(x, tau, y); }
  Mat gamma(double x, double y) const override;
  std::optional<IndexRange> domain() const override { return base_->domain(); }

 private:
  ModelPtr base_;
  int row_, col_;
  double delta_;
};

// ------------------------------------------------------------ estimators

// Base points and offsets (in lattice steps) for Γ-type suprema over pairs
// with 0 < |x - y| < 1, grouped in dyadic shells [2^{-n-1}, 2^{-n}).
struct PairSample {
  Lattice lattice;
  IndexRange window;
  std::vector<long> xs;
  std::vector<long> offsets;  // both signs
};

// cap <= 0 takes every offset of every shell.
PairSample make_pair_sample(Lattice lat, IndexRange window, long x_stride, long per_shell_cap,
                            int min_shell = 0);
std::vector<long> strided(IndexRange r, long stride);
int shell_of(long offset, const Lattice& lat);

struct SeminormCell {
  double level;
  int scale;  // j with δ = 2^{-j}, or the shell n of |x - y|
  double ratio = 0;
  double x = 0, y = 0;
  int tau = -1;
  int profile = -1;
};

struct SeminormReport {
  std::vector<SeminormCell> pi_cells, gamma_cells;
  double pi_norm = 0, gamma_norm = 0;
  double total() const { return pi_norm + gamma_norm; }
  nlohmann::json to_json() const;
};

// ε-weakening exponent: ζ - ε on non-integer levels, ζ on integer ones.
double weakened_level(double zeta, double eps);
// dist((A \ N) ∩ (-∞, γ), N ∩ (-∞, γ)), +inf if either side is empty.
double admissible_eps_bound(const RegStructure& T, double gamma);

// sup |⟨(Π^A_x - Π^B_x) τ, η^δ_x⟩| / δ^{ζ_ε}; B may be null.
SeminormReport estimate_pi_seminorm(const ContinuousModel& A, const ContinuousModel* B,
                                    double gamma, double eps, const ScaleFamily& fam,
                                    std::span<const long> xs, Exec exec = Exec::parallel);
// sup |(Γ^A_{x,y} - Γ^B_{x,y}) τ|_β / |x - y|^{ζ_ε - β}; B may be null.
SeminormReport estimate_gamma_seminorm(const ContinuousModel& A, const ContinuousModel* B,
                                       double gamma, double eps, const PairSample& pairs,
                                       Exec exec = Exec::parallel);
SeminormReport estimate_model_seminorm(const ContinuousModel& A, double gamma,
                                       const ScaleFamily& fam, std::span<const long> xs,
                                       const PairSample& pairs, Exec exec = Exec::parallel);
// ‖Z_A - Z_B‖_{γ,ε}; rejects ε at or above admissible_eps_bound.
SeminormReport weakened_seminorm(const ContinuousModel& A, const ContinuousModel& B,
                                 double gamma, double eps, const ScaleFamily& fam,
                                 std::span<const long> xs, const PairSample& pairs,
                                 Exec exec = Exec::parallel);
// Σ_{n>=0} 2^{-n} ‖Z_A - Z_B‖_n / (1 + ‖Z_A - Z_B‖_n), with ‖·‖_n the
// seminorm truncated at γ = n; the tail past max A is summed exactly.
double model_distance(const ContinuousModel& A, const ContinuousModel& B,
                      const ScaleFamily& fam, std::span<const long> xs, const PairSample& pairs,
                      Exec exec = Exec::parallel);

struct AlgebraicResidual {
  double pi = 0;     // max |Π_x Γ_{x,y} τ (y') - Π_y τ (y')|
  double gamma = 0;  // max |Γ_{x,y} Γ_{y,z} - Γ_{x,z}|
  double max() const { return pi > gamma ? pi : gamma; }
};
AlgebraicResidual check_algebraic(const ContinuousModel& Z, const Lattice& lat,
                                  IndexRange window, int samples, std::uint64_t seed,
                                  int eval_points = 16);

// CSV rows (tau, x, y, value).
void dump_model_samples(std::ostream& out, const ContinuousModel& Z, std::span<const double> xs,
                        std::span<const double> ys);

}  // namespace regrecon
