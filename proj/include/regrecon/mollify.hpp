// Mollification of models: the map J, the mollified model (Π̃, Γ̃) and the
// studies of its norm and of its convergence in the weakened topology.
#pragma once

#include "regrecon/fit.hpp"
#include "regrecon/lattice.hpp"
#include "regrecon/model.hpp"

#include <vector>

namespace regrecon {

// φ^λ sampled on the lattice, with derivative weights. Each weight vector is
// rescaled so that the discrete moment matching its order is exact:
// Σ_o w^{(k)}[o] (-oΔ)^k / k! = 1, which makes J annihilate what it should.
class DiscreteMollifier {
 public:
  DiscreteMollifier(int r, double lambda, Lattice lat);

  int smoothness() const { return r_; }
  double lambda() const { return lambda_; }
  const Lattice& lattice() const { return lat_; }
  long half_width() const { return m_; }
  // w^{(k)}[o + m], k <= r.
  const std::vector<double>& weights(int k) const;
  // D^k(φ^λ * g)(y_i) = Σ_o w^{(k)}[o] g(y_{i - o}); g[i] must be readable for |o| <= m.
  double apply(int k, const double* gi) const;
  // D^k(φ^λ * g) on the part of g's range at distance >= λ from its ends.
  GridFunction convolve(const GridFunction& g, int k = 0) const;

 private:
  int r_;
  double lambda_;
  Lattice lat_;
  long m_;
  std::vector<std::vector<double>> w_;
};

// D^k(φ^λ * Π_x τ)(x) by direct quadrature with the derivative moved onto φ.
double convolve_with_derivatives(const ContinuousModel& Z, const DiscreteMollifier& phi, int tau,
                                 double x, int k);

// Π̃_x τ = φ * Π_x τ - Π_x J(x) τ,  Γ̃_{x,y} = Γ_{x,y} + J(x)Γ_{x,y} - Γ_{x,y}J(y).
// Evaluable at lattice points of `window`. The convolutions are expanded around
// a fixed reference point x0: φ * Π_x τ = Σ_σ (Γ_{x0,x} τ)_σ φ * Π_{x0} σ.
class MollifiedModel final : public ContinuousModel {
 public:
  // skip_j drops the J correction (negative control only: not a model).
  MollifiedModel(ModelPtr base, DiscreteMollifier phi, IndexRange window, bool skip_j = false,
                 Exec exec = Exec::parallel);

  const RegStructure& structure() const override { return base_->structure(); }
  double pi(double x, int tau, double y) const override;
  Mat gamma(double x, double y) const override;
  void pi_row(double x, const Vec& v, const Lattice& lat, long first,
              std::span<double> out) const override;
  bool canonical_on_polynomials() const override { return base_->canonical_on_polynomials(); }
  std::optional<IndexRange> domain() const override { return window_; }

  // J(x) as a matrix: rows X^k, columns τ, entries D^k(φ * Π_x τ)(x) / k!.
  Mat J(double x) const;
  const DiscreteMollifier& mollifier() const { return phi_; }
  const ContinuousModel& base() const { return *base_; }

 private:
  long checked_index(double x) const;
  const double* coeffs(long xi, int tau) const;  // D^k(φ * Π_x τ)(x), k = 0..kmax

  ModelPtr base_;
  DiscreteMollifier phi_;
  IndexRange window_;
  bool skip_j_;
  double x0_;
  int kmax_;                           // largest derivative order used by J
  std::vector<int> poly_row_;          // basis index of X^k
  std::vector<std::vector<double>> conv0_;  // [σ][y - window.first]: (φ * Π_{x0} σ)(y)
  std::vector<double> c_;              // [(x - window.first) * dim + τ] * (kmax + 1) + k
};

struct MollifyStudySetup {
  ScaleFamily family;
  std::vector<long> xs;
  PairSample pairs;
  IndexRange window;  // evaluation window of the mollified models
  int r = 3;
  Exec exec = Exec::parallel;
};

// ‖Z^λ‖_γ / ‖Z‖_γ per λ, compared component by component: the reported value
// is max(‖Π^λ‖/‖Π‖, ‖Γ^λ‖/‖Γ‖). The per-level rows carry ‖Z^λ‖ split by level.
struct NormBoundReport {
  ConvergenceReport report;
  std::vector<double> pi_ratio, gamma_ratio, summed_ratio;
  double max_ratio() const;
  nlohmann::json to_json() const;
};
NormBoundReport mollification_norm_bound(ModelPtr Z, const std::vector<double>& lambdas,
                                         double gamma, const MollifyStudySetup& setup,
                                         bool skip_j = false);
// ‖Z - Z^λ‖_{γ,ε} per λ with a log-log fit that excludes the largest λ.
ConvergenceReport mollification_convergence(ModelPtr Z, const std::vector<double>& lambdas,
                                            double gamma, double eps,
                                            const MollifyStudySetup& setup);

}  // namespace regrecon
