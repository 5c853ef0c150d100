// Branched rough paths over a lattice time grid, controlled paths, the
// compensated Riemann sum, the rough path ↔ model correspondence and the
// mollified approximations built from it.
#pragma once

#include "regrecon/fit.hpp"
#include "regrecon/hopf.hpp"
#include "regrecon/modelled.hpp"
#include "regrecon/mollify.hpp"

#include <iosfwd>
#include <memory>

namespace regrecon {

using Char = hopf::Character<double>;
using AlgebraPtr = std::shared_ptr<const hopf::TruncatedAlgebra>;

// N = max{n : nα <= 1}; rejects Nα = 1 and N > 3.
int truncation_for(double alpha);

// d components sampled on consecutive lattice points.
struct PathSamples {
  Lattice lattice;
  long first = 0;
  std::vector<std::vector<double>> components;  // [j][i - first]

  int dim() const { return static_cast<int>(components.size()); }
  long size() const { return components.empty() ? 0 : static_cast<long>(components[0].size()); }
  IndexRange range() const { return {first, first + size() - 1}; }
  double at(int j, long i) const { return components[j][i - first]; }
};

void write_path_csv(std::ostream& out, const PathSamples& p);
PathSamples read_path_csv(std::istream& in, const Lattice& lat);

class BranchedRoughPath {
 public:
  // values[i] = X_{t_first, t_{first+i}}; the first must be the counit.
  BranchedRoughPath(double alpha, AlgebraPtr alg, Lattice lat, long first,
                    std::vector<Char> values);

  double alpha() const { return alpha_; }
  int N() const { return alg_->N(); }
  int d() const { return alg_->d(); }
  const AlgebraPtr& algebra() const { return alg_; }
  const Lattice& lattice() const { return lat_; }
  IndexRange range() const { return {first_, first_ + static_cast<long>(x_.size()) - 1}; }
  const Char& at(long i) const { return x_[check(i)]; }
  const Char& inverse_at(long i) const { return inv_[check(i)]; }
  // X_{s,t} = X_s^{-1} ⋆ X_t
  Char increment(long s, long t) const;
  // ⟨X_{s,t}, forest⟩
  double increment_value(long s, long t, int forest) const;

  // sup over pairs and nonempty forests of |⟨X_{s,t}, τ⟩| / |t - s|^{α|τ|}
  double holder_statistic(const PairSample& pairs) const;
  // CSV rows (t, forest, value) of X_{t_first, t}.
  void dump(std::ostream& out, long stride = 1) const;

 private:
  std::size_t check(long i) const;

  double alpha_;
  AlgebraPtr alg_;
  Lattice lat_;
  long first_;
  std::vector<Char> x_, inv_;
};

// Canonical lift of the piecewise-linear interpolation: tree values by
// ⟨X_{s,t}, [τ_1⋯τ_k]_j⟩ = ∫_s^t Π_i ⟨X_{s,u}, τ_i⟩ dX^j_u, integrated exactly
// segment by segment. N = 0 selects truncation_for(alpha).
BranchedRoughPath lift_path(const PathSamples& path, double alpha, int N = 0);
// The same recursion restarted at u and run up to t: an independent ⟨X_{u,t}, ·⟩.
Char integrate_increment(const PathSamples& path, const AlgebraPtr& alg, long u, long t);

struct ChenReport {
  double chen = 0;         // max |X_{s,u} ⋆ X_{u,t} - X_{s,t}| over forests
  double independent = 0;  // max |X_s^{-1} ⋆ X_t - integrated X_{s,t}|
  int triples = 0;
};
ChenReport chen_check(const BranchedRoughPath& X, const PathSamples& path, int triples,
                      std::uint64_t seed);

// sup |⟨X_{s,t} - Y_{s,t}, τ⟩| / |t - s|^{α|τ| - eps} over the pairs common to both.
double rough_path_distance(const BranchedRoughPath& X, const BranchedRoughPath& Y,
                           const PairSample& pairs, double eps = 0.0);

// Coefficients Z_t(τ) indexed by the forests of X's algebra; only forests with
// at most N - 1 nodes may be nonzero.
class ControlledPath {
 public:
  ControlledPath(AlgebraPtr alg, Lattice lat, long first, long count);

  const AlgebraPtr& algebra() const { return alg_; }
  const Lattice& lattice() const { return lat_; }
  IndexRange range() const { return {first_, first_ + count_ - 1}; }
  int forests() const { return static_cast<int>(alg_->forests().size()); }
  double operator()(long i, int forest) const { return z_[slot(i) * forests() + forest]; }
  void set(long i, int forest, double v);
  // ⟨1, Z_t⟩
  double path(long i) const { return (*this)(i, 0); }
  ControlledPath scaled(double s) const;

 private:
  std::size_t slot(long i) const;
  AlgebraPtr alg_;
  Lattice lat_;
  long first_, count_;
  std::vector<double> z_;
};

// Z_t = g(X^j_t) with coefficients g^{(k)}(X^j_t)/k! on •_j^k; g given with
// derivatives up to N - 1.
ControlledPath controlled_function(const BranchedRoughPath& X, const PathSamples& path, int j,
                                   const SmoothFunction& g);

// ⟨X_{s,t} ⋆ τ, Z_s⟩ = Σ_σ Z_s(σ) Σ_{(P, τ) ∈ Δσ} c ⟨X_{s,t}, P⟩
double transported_coefficient(const ControlledPath& Z, const Char& Xst, long s, int tau);

struct ControlledNorm {
  double sup = 0;        // max_τ sup_t |⟨τ, Z_t⟩|
  double remainder = 0;  // sup |⟨τ,Z_t⟩ - ⟨X_{s,t}⋆τ, Z_s⟩| / |t-s|^{(N-|τ|)α}
  double total() const { return sup + remainder; }
};
ControlledNorm controlled_norm(const ControlledPath& Z, const BranchedRoughPath& X,
                               const PairSample& pairs);

// Σ_{[u,v]} Σ_{|τ| <= N-1} ⟨τ, Z_u⟩ ⟨X_{u,v}, [τ]_j⟩ over the partition of
// [s,t] by the points of Λ_n.
double rough_integral(const BranchedRoughPath& X, const ControlledPath& Z, long s, long t,
                      int n, int j);

struct IntegralTable {
  ConvergenceReport report;  // |I_n - I_ref| against mesh 2^{-n}
  std::vector<double> values;
  double reference = 0;      // the finest-mesh value
  double extrapolated = 0;   // Richardson step with the fitted rate
  nlohmann::json to_json() const;
};
IntegralTable rough_integral_table(const BranchedRoughPath& X, const ControlledPath& Z, long s,
                                   long t, const std::vector<int>& levels, int ref_level, int j,
                                   Exec exec = Exec::parallel);

// Π_s τ (t) = ⟨X_{s,t}, τ⟩,  Γ_{s,t} τ = (X_{t,s} ⊗ id) Δτ, on the forests of X's
// algebra with levels α|τ| (structure γ = 1).
class RoughPathModel final : public ContinuousModel {
 public:
  explicit RoughPathModel(std::shared_ptr<const BranchedRoughPath> X);

  const RegStructure& structure() const override { return T_; }
  double pi(double x, int tau, double y) const override;
  Mat gamma(double x, double y) const override;
  void pi_row(double x, const Vec& v, const Lattice& lat, long first,
              std::span<double> out) const override;
  bool canonical_on_polynomials() const override { return true; }
  std::optional<IndexRange> domain() const override { return X_->range(); }
  const BranchedRoughPath& path() const { return *X_; }

 private:
  std::shared_ptr<const BranchedRoughPath> X_;
  RegStructure T_;
};

std::shared_ptr<const RoughPathModel> rp_to_model(std::shared_ptr<const BranchedRoughPath> X);
// f(t) = Σ_τ Z_t(τ) τ with γ = Nα.
ModelledDistribution controlled_to_md(const ControlledPath& Z, ModelPtr model);

// ⟨X^λ_{s,t}, τ⟩ = (φ * ⟨X_{s,·}, τ⟩)(t) - (φ * ⟨X_{s,·}, τ⟩)(s) on trees,
// forests by multiplicativity. Evaluated through a reference point t0:
// ⟨X_{s,·}, τ⟩ = Σ_{(P,R) ∈ Δτ} c ⟨X_{s,t0}, P⟩ ⟨X_{t0,·}, R⟩.
class MollifiedRoughPath {
 public:
  MollifiedRoughPath(std::shared_ptr<const BranchedRoughPath> X, DiscreteMollifier phi);

  IndexRange range() const { return range_; }
  // The formula increment, defined for any s, t in range().
  Char increment(long s, long t) const;
  // The path t ↦ X^λ_{t_first, t} as a branched rough path.
  const BranchedRoughPath& path() const { return *path_; }
  std::shared_ptr<const BranchedRoughPath> path_ptr() const { return path_; }
  const DiscreteMollifier& mollifier() const { return phi_; }
  // max |X^λ_{s,u} ⋆ X^λ_{u,t} - X^λ_{s,t}| with formula increments.
  double chen_residual(int triples, std::uint64_t seed) const;

 private:
  std::shared_ptr<const BranchedRoughPath> X_;
  DiscreteMollifier phi_;
  IndexRange range_;
  long t0_;
  std::vector<std::vector<double>> conv_;  // [tree][i - range.first]: φ * ⟨X_{t0,·}, tree⟩
  std::shared_ptr<const BranchedRoughPath> path_;
};

MollifiedRoughPath mollify_rough_path(std::shared_ptr<const BranchedRoughPath> X,
                                      const DiscreteMollifier& phi);

// Z^λ: tree coefficients of Z, the empty-forest slot replaced by φ * Z
// (additive = true keeps Z and adds φ * Z instead).
ControlledPath mollify_controlled_path(const ControlledPath& Z, const DiscreteMollifier& phi,
                                       bool additive = false);

struct MollifiedIntegralRow {
  double lambda;
  double value;   // ∫ Z^λ dX^λ at the grid mesh
  double target;  // ∫ φ^λ(δ) ∫_{s-δ}^{t-δ} Z dX dδ
  double error;
};
struct MollifiedIntegralTable {
  std::vector<MollifiedIntegralRow> rows;
  ConvergenceReport report;  // error against λ
  bool monotone = false;     // error decreases with λ
  nlohmann::json to_json() const;
};
MollifiedIntegralTable rough_integral_mollified(std::shared_ptr<const BranchedRoughPath> X,
                                                const ControlledPath& Z,
                                                const std::vector<double>& lambdas, int r,
                                                long s, long t, int j,
                                                Exec exec = Exec::parallel);

}  // namespace regrecon
