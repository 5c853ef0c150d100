// Reconstruction for continuous models, dyadic local averages and the
// estimators of the reconstruction and continuity bounds.
#pragma once

#include "regrecon/fit.hpp"
#include "regrecon/modelled.hpp"

#include <iosfwd>

namespace regrecon {

// F(y) = (Π_y f(y))(y) on f's range.
GridFunction reconstruct(const ModelledDistribution& f);

struct LocalAverages {
  int level;
  long k_first;
  std::vector<Vec> values;  // at x = k 2^{-level}, k = k_first, ...
  bool has(long k) const {
    return k >= k_first && k < k_first + static_cast<long>(values.size());
  }
  const Vec& at(long k) const;
};

// f̄^n(x) = average over the cell [x - 2^{-n-1}, x + 2^{-n-1}] of Γ_{x,y} f(y)
// (trapezoid rule), for the x ∈ Λ_n whose cell lies in f's range.
LocalAverages local_averages(const ModelledDistribution& f, int n);

struct AverageConsistency {
  ConvergenceReport report;  // per-n shell value (summed over levels), fit vs n
  double q_statistic = 0;    // ‖shell values‖_{l^q(n)}
  int C = 2;
  nlohmann::json to_json() const;
};

// Shell n: Σ_{h ∈ Λ_{n+1}, |h| <= C 2^{-n-1}} Σ_ζ ‖|f̄^n(x) - Γ_{x,x+h} f̄^{n+1}(x+h)|_ζ / 2^{-n(γ-ζ)}‖_{l^p_n}
// with |a|^p_{l^p_n} = Σ_x |a_x|^p 2^{-n}.
AverageConsistency average_consistency(const ModelledDistribution& f, int n_lo, int n_hi,
                                       double gamma, double p, double q, int C = 2);

struct ReconBoundReport {
  struct Row {
    double x;
    int j;
    int profile;
    double pairing;  // |⟨F - Π_x f(x), η^δ_x⟩|
    double ratio;    // pairing / δ^{γ-ε}
  };
  std::vector<Row> rows;
  std::vector<int> js;
  std::vector<double> sup_pairing;  // per j: sup over x and profiles
  std::vector<double> sup_ratio;    // per j
  double composite = 0;             // L^q_δ(L^p_x(sup_η ratio))
  LinearFit fit;                    // log2 sup_pairing vs log2 δ
  double gamma = 0, eps = 0, p = kInf, q = kInf;
  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

ReconBoundReport recon_bound(const ModelledDistribution& f, double gamma, const ScaleFamily& fam,
                             std::span<const long> xs, double p = kInf, double q = kInf,
                             double eps = 0.0, Exec exec = Exec::parallel);
// Pairings of (R_Z f - Π_x f(x)) - (R_Z̄ f̄ - Π̄_x f̄(x)).
ReconBoundReport recon_two_model_bound(const ModelledDistribution& f,
                                       const ModelledDistribution& fbar, double gamma,
                                       const ScaleFamily& fam, std::span<const long> xs,
                                       double p = kInf, double q = kInf, double eps = 0.0,
                                       Exec exec = Exec::parallel);

// N0 = floor(-log2 δ) - c with c the least integer such that B_δ(x) lies in the
// support of the partition function of the closest point x0 ∈ Λ_N0, for every x.
struct StartLevel {
  int n0;
  int c;
};
StartLevel choose_n0(double delta, double support_radius = 1.0);

// The three-summand decomposition of F(y) - Π_x f(x)(y) between levels N0 < N1,
// re-summed; returns max |decomposition - direct| over the sampled y.
double telescoping_residual(const ModelledDistribution& f, long x, std::span<const long> ys,
                            int n0, int n1);

}  // namespace regrecon
