#include "regrecon/weierstrass.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace regrecon {

Weierstrass::Weierstrass(double alpha, int K, std::uint64_t seed) : alpha_(alpha), K_(K) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("weierstrass: alpha in (0,1)");
  if (K < 0 || K > 60) throw std::invalid_argument("weierstrass: K in [0, 60]");
  std::mt19937_64 rng(seed);
  // Bit-level conversion keeps the phases identical across standard libraries.
  for (int k = 0; k <= K; ++k)
    theta_.push_back(2 * std::numbers::pi * std::ldexp(static_cast<double>(rng() >> 11), -53));
  w0_ = (*this)(0.0);
}

double Weierstrass::operator()(double t) const {
  double acc = 0;
  for (int k = 0; k <= K_; ++k)
    acc += std::exp2(-k * alpha_) * std::cos(std::ldexp(std::numbers::pi, k) * t + theta_[k]);
  return acc;
}

int default_terms(const Lattice& lat) { return std::max(0, lat.level - 2); }

double holder_constant(const GridFunction& g, double alpha, const PairSample& pairs) {
  const auto r = g.range();
  double best = 0;
  for (long xi : pairs.xs) {
    if (!r.contains(xi)) continue;
    for (long o : pairs.offsets) {
      const long yi = xi + o;
      if (!r.contains(yi) || !pairs.window.contains(yi)) continue;
      const double q = std::abs(g.at(xi) - g.at(yi)) /
                       std::pow(std::abs(static_cast<double>(o)) * pairs.lattice.step(), alpha);
      best = std::max(best, q);
    }
  }
  return best;
}

GridFunction sample(const Lattice& lat, IndexRange window,
                    const std::function<double(double)>& fn) {
  GridFunction g{lat, window.first, {}};
  g.values.reserve(window.size());
  for (long i = window.first; i <= window.last; ++i) g.values.push_back(fn(lat.point(i)));
  return g;
}

}  // namespace regrecon
