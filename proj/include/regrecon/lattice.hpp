// The working lattice Δ·Z (Δ = 2^{-L}) on which all one-dimensional analytic
// objects are sampled, and the discrete pairing with rescaled test functions.
#pragma once

#include "regrecon/structures.hpp"

#include <cmath>
#include <vector>

namespace regrecon {

struct Lattice {
  int level = 12;

  double step() const { return std::ldexp(1.0, -level); }
  double point(long i) const { return std::ldexp(static_cast<double>(i), -level); }
  bool on_lattice(double x) const;
  long index(double x) const;  // throws unless x is a lattice point
  // Number of lattice steps in a dyadic length 2^{-j}; throws if j > level.
  long steps(int j) const;
};

struct IndexRange {
  long first = 0, last = -1;  // inclusive
  long size() const { return last - first + 1; }
  bool contains(long i) const { return i >= first && i <= last; }
};

// Values on consecutive lattice points first, first + 1, ...
struct GridFunction {
  Lattice lattice;
  long first = 0;
  std::vector<double> values;

  IndexRange range() const { return {first, first + static_cast<long>(values.size()) - 1}; }
  double at(long i) const;
};

// w[o + m] with ⟨g, η^δ_x⟩ ≈ Σ_{|o|<=m} g(x + oΔ) w[o + m] for δ = mΔ: the
// trapezoid rule on the lattice (the profile vanishes at the endpoints).
std::vector<double> pairing_weights(const PolyProfile& eta, long m);

// Test profiles at dyadic scales δ = 2^{-j}, with their lattice weights.
class ScaleFamily {
 public:
  ScaleFamily(Lattice lat, std::vector<PolyProfile> profiles, std::vector<int> js);

  const Lattice& lattice() const { return lat_; }
  const std::vector<int>& scales() const { return js_; }
  int profile_count() const { return static_cast<int>(profiles_.size()); }
  const PolyProfile& profile(int p) const { return profiles_[p]; }
  long half_width(int scale) const { return lat_.steps(js_[scale]); }
  long max_half_width() const;
  const std::vector<double>& weights(int scale, int p) const { return w_[scale][p]; }
  double delta(int scale) const { return std::ldexp(1.0, -js_[scale]); }

 private:
  Lattice lat_;
  std::vector<PolyProfile> profiles_;
  std::vector<int> js_;
  std::vector<std::vector<std::vector<double>>> w_;
};

std::vector<int> int_range(int lo, int hi);  // lo..hi inclusive

}  // namespace regrecon
