#include "regrecon/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace regrecon {

bool Lattice::on_lattice(double x) const {
  double u = std::ldexp(x, level);
  return u == std::round(u);
}

long Lattice::index(double x) const {
  double u = std::ldexp(x, level);
  if (u != std::round(u))
    throw std::invalid_argument("point " + std::to_string(x) + " is not on the lattice");
  return static_cast<long>(u);
}

long Lattice::steps(int j) const {
  if (j > level)
    throw std::invalid_argument("scale 2^-" + std::to_string(j) +
                                " is finer than the working lattice");
  return 1L << (level - j);
}

double GridFunction::at(long i) const {
  if (i < first || i >= first + static_cast<long>(values.size()))
    throw std::out_of_range("grid function: index outside sampled window");
  return values[i - first];
}

std::vector<double> pairing_weights(const PolyProfile& eta, long m) {
  if (m < 1) throw std::invalid_argument("pairing weights: under-resolved scale");
  std::vector<double> w(2 * m + 1);
  for (long o = -m; o <= m; ++o)
    w[o + m] = eta(static_cast<double>(o) / static_cast<double>(m)) / static_cast<double>(m);
  return w;
}

ScaleFamily::ScaleFamily(Lattice lat, std::vector<PolyProfile> profiles, std::vector<int> js)
    : lat_(lat), profiles_(std::move(profiles)), js_(std::move(js)) {
  if (profiles_.empty() || js_.empty()) throw std::invalid_argument("scale family: empty");
  for (int j : js_) {
    if (j < 0) throw std::invalid_argument("scale family: scales must satisfy delta <= 1");
    long m = lat_.steps(j);
    if (m < 4) throw std::invalid_argument("scale family: scale 2^-" + std::to_string(j) +
                                           " under-resolved by the lattice");
    std::vector<std::vector<double>> row;
    for (const auto& p : profiles_) row.push_back(pairing_weights(p, m));
    w_.push_back(std::move(row));
  }
}

long ScaleFamily::max_half_width() const {
  long m = 0;
  for (std::size_t s = 0; s < js_.size(); ++s) m = std::max(m, half_width(static_cast<int>(s)));
  return m;
}

std::vector<int> int_range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

}  // namespace regrecon
