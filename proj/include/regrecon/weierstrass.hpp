// Deterministic rough signals: W_α(t) = Σ_{k<=K} 2^{-kα} cos(2^k π t + θ_k).
#pragma once

#include "regrecon/lattice.hpp"
#include "regrecon/model.hpp"

#include <cstdint>
#include <vector>

namespace regrecon {

class Weierstrass {
 public:
  Weierstrass(double alpha, int K, std::uint64_t seed);

  double operator()(double t) const;
  // h(t) = W(t) - W(0), so that h(0) = 0.
  double centered(double t) const { return (*this)(t) - w0_; }
  double alpha() const { return alpha_; }
  int terms() const { return K_; }
  const std::vector<double>& phases() const { return theta_; }

 private:
  double alpha_;
  int K_;
  std::vector<double> theta_;
  double w0_ = 0;
};

// Frequency cut-off tied to the lattice: the finest mode keeps 8 samples per period.
int default_terms(const Lattice& lat);

// sup |g(x) - g(y)| / |x - y|^α over the pair sample, g sampled on the window.
double holder_constant(const GridFunction& g, double alpha, const PairSample& pairs);

GridFunction sample(const Lattice& lat, IndexRange window, const std::function<double(double)>& fn);

}  // namespace regrecon
