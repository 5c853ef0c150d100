// Modelled distributions: grid fields x ↦ f(x) ∈ T_{<γ}, their D^γ_{p,q}
// norms and distances, canonical lifts, localized constants and the dyadic
// density approximants.
#pragma once

#include "regrecon/lattice.hpp"
#include "regrecon/model.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>

namespace regrecon {

class ModelledDistribution {
 public:
  ModelledDistribution(ModelPtr model, Lattice lat, IndexRange range, double gamma);

  const ContinuousModel& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const Lattice& lattice() const { return lat_; }
  IndexRange range() const { return range_; }
  double gamma() const { return gamma_; }
  int dim() const { return dim_; }

  Vec at(long i) const;
  // Stores v; coefficients at levels >= γ must vanish.
  void set(long i, const Vec& v);

  ModelledDistribution restricted(IndexRange r) const;
  friend ModelledDistribution operator+(const ModelledDistribution& a,
                                        const ModelledDistribution& b);
  friend ModelledDistribution operator-(const ModelledDistribution& a,
                                        const ModelledDistribution& b);
  friend ModelledDistribution operator*(double s, const ModelledDistribution& a);

  // CSV rows (x, level, basis index, coefficient).
  void dump(std::ostream& out) const;

 private:
  ModelPtr model_;
  Lattice lat_;
  IndexRange range_;
  double gamma_;
  int dim_;
  std::vector<double> data_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DGammaNorm {
  std::map<double, double> lp;           // per level: ‖|f|_ζ‖_{L^p}
  std::map<double, double> translation;  // per level: the h-integral term
  std::vector<std::tuple<double, int, double>> shells;  // (level, n, sup over the shell)
  double total = 0;
  nlohmann::json to_json() const;
};

// Both legs of the norm on the pair sample: x over pairs.xs (L^p weight Δ·stride),
// h over pairs.offsets; the h-measure of each sampled offset is the lattice
// measure of the shell part it represents.
DGammaNorm dgamma_norm(const ModelledDistribution& f, double gamma, double p, double q,
                       const PairSample& pairs, Exec exec = Exec::parallel);
// ‖f, f̄‖ with the translation term built from
// f(x+h) - Γ_{x+h,x} f(x) - f̄(x+h) + Γ̄_{x+h,x} f̄(x).
DGammaNorm dgamma_distance(const ModelledDistribution& f, const ModelledDistribution& fbar,
                           double gamma, double p, double q, const PairSample& pairs,
                           Exec exec = Exec::parallel);

// A smooth function given with its derivatives up to `order`.
struct SmoothFunction {
  std::function<double(int, double)> d;  // (k, x) -> D^k φ(x)
  int order;
  double operator()(double x) const { return d(0, x); }
};
// x ↦ p((x - c)/ρ) for a polynomial profile p.
SmoothFunction profile_function(const PolyProfile& p, double center, double radius, int order);
SmoothFunction polynomial_function(std::vector<double> coef);  // Σ a_i x^i

// Φ(x) = Σ_{k<γ} X^k / k! D^kφ(x) on the monomials of the model's structure.
ModelledDistribution canonical_lift(const SmoothFunction& phi, ModelPtr model, Lattice lat,
                                    IndexRange range, double gamma);

// f_{z,φ,τ}(x) = Φ(x) ⋆ Γ_{x,z} τ with τ a core vector (any level).
ModelledDistribution elementary_md(double z, const SmoothFunction& phi, const Vec& tau_core,
                                   std::shared_ptr<const StarExtendedModel> model, Lattice lat,
                                   IndexRange range);
// The constant f_{z,τ}(x) = Γ_{x,z} τ.
ModelledDistribution constant_md(double z, const Vec& tau, ModelPtr model, Lattice lat,
                                 IndexRange range, double gamma);

// f^n(x) = Σ_{k ∈ Λ_n} 1^n_k(x) ⋆ Γ_{x,k} f(k), the partition lifted canonically.
// Defined on the x for which every active k lies in f's range.
ModelledDistribution density_approximant(const ModelledDistribution& f, int n,
                                         std::shared_ptr<const StarExtendedModel> model);

}  // namespace regrecon
