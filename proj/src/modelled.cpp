#include "regrecon/modelled.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace regrecon {

ModelledDistribution::ModelledDistribution(ModelPtr model, Lattice lat, IndexRange range,
                                           double gamma)
    : model_(std::move(model)),
      lat_(lat),
      range_(range),
      gamma_(gamma),
      dim_(model_->structure().dim()),
      data_(static_cast<std::size_t>(range.size()) * dim_, 0.0) {
  if (range.size() < 1) throw std::invalid_argument("modelled distribution: empty range");
  if (!(gamma > model_->structure().min_level()))
    throw std::invalid_argument("modelled distribution: gamma must exceed min A");
}

Vec ModelledDistribution::at(long i) const {
  if (!range_.contains(i)) throw std::out_of_range("modelled distribution: index outside range");
  return Eigen::Map<const Eigen::VectorXd>(data_.data() + (i - range_.first) * dim_, dim_);
}

void ModelledDistribution::set(long i, const Vec& v) {
  if (!range_.contains(i)) throw std::out_of_range("modelled distribution: index outside range");
  const RegStructure& T = model_->structure();
  for (int t = 0; t < dim_; ++t)
    if (v[t] != 0 && !(T.level(t) < gamma_ - 1e-12))
      throw std::invalid_argument("modelled distribution: coefficient at level >= gamma");
  std::copy(v.data(), v.data() + dim_, data_.begin() + (i - range_.first) * dim_);
}

ModelledDistribution ModelledDistribution::restricted(IndexRange r) const {
  if (!range_.contains(r.first) || !range_.contains(r.last))
    throw std::out_of_range("modelled distribution: restriction outside range");
  ModelledDistribution out(model_, lat_, r, gamma_);
  for (long i = r.first; i <= r.last; ++i) out.set(i, at(i));
  return out;
}

namespace {

ModelledDistribution combine(const ModelledDistribution& a, const ModelledDistribution& b,
                             double sb) {
  if (a.dim() != b.dim() || a.gamma() != b.gamma())
    throw std::invalid_argument("modelled distribution: incompatible operands");
  IndexRange r{std::max(a.range().first, b.range().first),
               std::min(a.range().last, b.range().last)};
  ModelledDistribution out(a.model_ptr(), a.lattice(), r, a.gamma());
  for (long i = r.first; i <= r.last; ++i) out.set(i, a.at(i) + sb * b.at(i));
  return out;
}

}  // namespace

ModelledDistribution operator+(const ModelledDistribution& a, const ModelledDistribution& b) {
  return combine(a, b, 1.0);
}
ModelledDistribution operator-(const ModelledDistribution& a, const ModelledDistribution& b) {
  return combine(a, b, -1.0);
}
ModelledDistribution operator*(double s, const ModelledDistribution& a) {
  ModelledDistribution out(a.model_ptr(), a.lattice(), a.range(), a.gamma());
  for (long i = a.range().first; i <= a.range().last; ++i) out.set(i, s * a.at(i));
  return out;
}

void ModelledDistribution::dump(std::ostream& out) const {
  const RegStructure& T = model_->structure();
  out.precision(17);
  out << "x,level,basis,coefficient\n";
  for (long i = range_.first; i <= range_.last; ++i) {
    const Vec v = at(i);
    for (int t = 0; t < dim_; ++t)
      out << lat_.point(i) << "," << T.level(t) << "," << t << "," << v[t] << "\n";
  }
}

// ---------------------------------------------------------------- norms

namespace {

double lp_accumulate(double acc, double v, double p) {
  return std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p);
}

double lp_finish(double acc, double p, double weight) {
  return std::isinf(p) ? acc : std::pow(acc * weight, 1.0 / p);
}

// Lattice measure represented by each sampled offset: shell size / samples in shell.
std::vector<double> offset_weights(const PairSample& pairs) {
  std::map<std::pair<int, bool>, int> sampled;
  for (long o : pairs.offsets) ++sampled[{shell_of(o, pairs.lattice), o > 0}];
  std::vector<double> w;
  for (long o : pairs.offsets) {
    const int n = shell_of(o, pairs.lattice);
    const double shell_size = static_cast<double>(1L << (pairs.lattice.level - n - 1));
    w.push_back(shell_size / sampled[{n, o > 0}] * pairs.lattice.step());
  }
  return w;
}

// g(o, x, ζ) callback gives |...|_ζ at base point x and offset o; returns the norm.
template <class Diff, class Coef>
DGammaNorm dgamma_core(const RegStructure& T, IndexRange range, const Lattice& lat, double gamma,
                       double p, double q, const PairSample& pairs, Exec exec, Coef&& coef,
                       Diff&& diff) {
  if (!(p >= 1) || !(q >= 1)) throw std::invalid_argument("dgamma: p, q in [1, inf]");
  const auto levels = T.levels_below(gamma);
  if (levels.empty()) throw std::invalid_argument("dgamma: gamma <= min A (empty level set)");
  const long stride = pairs.xs.size() > 1 ? pairs.xs[1] - pairs.xs[0] : 1;
  const double xw = lat.step() * static_cast<double>(stride);
  std::vector<long> xs;
  for (long x : pairs.xs)
    if (range.contains(x)) xs.push_back(x);

  DGammaNorm out;
  // L^p legs
  for (double z : levels) {
    double acc = 0;
    for (long x : xs) acc = lp_accumulate(acc, T.level_norm(coef(x), z), p);
    out.lp[z] = lp_finish(acc, p, xw);
  }
  // translation legs: per offset, the L^p norm in x of each level
  const auto ow = offset_weights(pairs);
  const std::size_t L = levels.size();
  auto per_offset = map_indices<std::vector<double>>(exec, pairs.offsets.size(), [&](std::size_t k) {
    const long o = pairs.offsets[k];
    const double hn = std::abs(static_cast<double>(o)) * lat.step();
    std::vector<double> acc(L, 0.0);
    for (long x : xs) {
      if (!range.contains(x + o)) continue;
      const Vec d = diff(x, o);
      for (std::size_t l = 0; l < L; ++l)
        acc[l] = lp_accumulate(acc[l], T.level_norm(d, levels[l]) / std::pow(hn, gamma - levels[l]), p);
    }
    for (std::size_t l = 0; l < L; ++l) acc[l] = lp_finish(acc[l], p, xw);
    return acc;
  });
  std::map<std::pair<double, int>, double> shell_sup;
  for (std::size_t l = 0; l < L; ++l) {
    double acc = 0;
    for (std::size_t k = 0; k < pairs.offsets.size(); ++k) {
      const long o = pairs.offsets[k];
      const double v = per_offset[k][l];
      const double hn = std::abs(static_cast<double>(o)) * lat.step();
      auto& s = shell_sup[{levels[l], shell_of(o, lat)}];
      s = std::max(s, v);
      acc = std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q) * ow[k] / hn;
    }
    out.translation[levels[l]] = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
  }
  for (auto& [k, v] : shell_sup) out.shells.emplace_back(k.first, k.second, v);
  for (double z : levels) out.total += out.lp[z] + out.translation[z];
  return out;
}

}  // namespace

DGammaNorm dgamma_norm(const ModelledDistribution& f, double gamma, double p, double q,
                       const PairSample& pairs, Exec exec) {
  const Lattice& lat = f.lattice();
  return dgamma_core(
      f.model().structure(), f.range(), lat, gamma, p, q, pairs, exec,
      [&](long x) { return f.at(x); },
      [&](long x, long o) -> Vec {
        return f.at(x + o) - f.model().gamma(lat.point(x + o), lat.point(x)) * f.at(x);
      });
}

DGammaNorm dgamma_distance(const ModelledDistribution& f, const ModelledDistribution& fbar,
                           double gamma, double p, double q, const PairSample& pairs,
                           Exec exec) {
  if (f.dim() != fbar.dim()) throw std::invalid_argument("dgamma distance: structure mismatch");
  const Lattice& lat = f.lattice();
  IndexRange r{std::max(f.range().first, fbar.range().first),
               std::min(f.range().last, fbar.range().last)};
  return dgamma_core(
      f.model().structure(), r, lat, gamma, p, q, pairs, exec,
      [&](long x) -> Vec { return f.at(x) - fbar.at(x); },
      [&](long x, long o) -> Vec {
        const double xh = lat.point(x + o), xx = lat.point(x);
        return f.at(x + o) - f.model().gamma(xh, xx) * f.at(x) - fbar.at(x + o) +
               fbar.model().gamma(xh, xx) * fbar.at(x);
      });
}

nlohmann::json DGammaNorm::to_json() const {
  nlohmann::json j;
  j["total"] = total;
  for (auto [z, v] : lp) j["lp"][std::to_string(z)] = v;
  for (auto [z, v] : translation) j["translation"][std::to_string(z)] = v;
  nlohmann::json s = nlohmann::json::array();
  for (auto [z, n, v] : shells) s.push_back({{"level", z}, {"shell", n}, {"sup", v}});
  j["shells"] = s;
  return j;
}

// ------------------------------------------------------------ builders

SmoothFunction profile_function(const PolyProfile& p, double center, double radius, int order) {
  return {[p, center, radius](int k, double x) {
            return std::pow(radius, -k) * p.derivative(k, (x - center) / radius);
          },
          order};
}

SmoothFunction polynomial_function(std::vector<double> coef) {
  PolyProfile p(coef);
  return {[p, coef](int k, double x) {
            double acc = 0;
            for (int i = static_cast<int>(coef.size()) - 1; i >= k; --i) {
              double f = coef[i];
              for (int j = 0; j < k; ++j) f *= i - j;
              acc = acc * x + f;
            }
            return acc;
          },
          std::numeric_limits<int>::max()};
}

namespace {

std::vector<double> lift_coefficients(const SmoothFunction& phi, double x, int kmax) {
  std::vector<double> c(kmax + 1);
  double kf = 1;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) kf *= k;
    c[k] = phi.d(k, x) / kf;
  }
  return c;
}

int max_degree_below(double gamma) {
  int k = 0;
  while (k + 1 < gamma - 1e-12) ++k;
  return k;
}

}  // namespace

ModelledDistribution canonical_lift(const SmoothFunction& phi, ModelPtr model, Lattice lat,
                                    IndexRange range, double gamma) {
  const RegStructure& T = model->structure();
  const int kmax = max_degree_below(gamma);
  if (phi.order < kmax)
    throw std::invalid_argument("canonical lift: function not smooth enough for gamma");
  ModelledDistribution f(model, lat, range, gamma);
  for (long i = range.first; i <= range.last; ++i) {
    Vec v = Vec::Zero(T.dim());
    auto c = lift_coefficients(phi, lat.point(i), kmax);
    for (int k = 0; k <= kmax; ++k) {
      std::vector<int> mono{k};
      const int idx = T.monomial_index(mono);
      if (idx < 0) throw std::invalid_argument("canonical lift: missing monomial");
      v[idx] = c[k];
    }
    f.set(i, v);
  }
  return f;
}

ModelledDistribution elementary_md(double z, const SmoothFunction& phi, const Vec& tau_core,
                                   std::shared_ptr<const StarExtendedModel> model, Lattice lat,
                                   IndexRange range) {
  const double gamma = model->structure().gamma();
  const int kmax = max_degree_below(gamma);
  if (phi.order < kmax) throw std::invalid_argument("elementary md: function not smooth enough");
  ModelledDistribution f(model, lat, range, gamma);
  for (long i = range.first; i <= range.last; ++i) {
    const double x = lat.point(i);
    const Vec g = model->from_core(model->core().gamma(x, z) * tau_core);
    f.set(i, model->star(lift_coefficients(phi, x, kmax), g));
  }
  return f;
}

ModelledDistribution constant_md(double z, const Vec& tau, ModelPtr model, Lattice lat,
                                 IndexRange range, double gamma) {
  ModelledDistribution f(model, lat, range, gamma);
  for (long i = range.first; i <= range.last; ++i) f.set(i, model->gamma(lat.point(i), z) * tau);
  return f;
}

ModelledDistribution density_approximant(const ModelledDistribution& f, int n,
                                         std::shared_ptr<const StarExtendedModel> model) {
  const Lattice& lat = f.lattice();
  if (n < 0) throw std::invalid_argument("density approximant: n >= 0");
  if (n > lat.level - 2)
    throw std::invalid_argument("density approximant: partition level " + std::to_string(n) +
                                " under-resolved by the lattice");
  const PartitionOfUnity part(n);
  const int kmax = max_degree_below(f.gamma());
  if (kmax > 2) throw std::invalid_argument("density approximant: gamma <= 3 supported");
  const long cell = lat.steps(n);
  const auto r = f.range();
  // x such that every active k (within one cell) lies in range
  IndexRange out_r{r.first + cell, r.last - cell};
  if (out_r.size() < 1) throw std::invalid_argument("density approximant: range too short");
  ModelledDistribution fn(model, lat, out_r, f.gamma());
  for (long i = out_r.first; i <= out_r.last; ++i) {
    const double x = lat.point(i);
    Vec acc = Vec::Zero(f.dim());
    for (long k : part.active(x)) {
      const double xk = std::ldexp(static_cast<double>(k), -n);
      std::vector<double> lift(kmax + 1);
      double kf = 1;
      for (int j = 0; j <= kmax; ++j) {
        if (j > 0) kf *= j;
        lift[j] = part.derivative(j, k, x) / kf;
      }
      acc += model->star(lift, model->gamma(x, xk) * f.at(lat.index(xk)));
    }
    fn.set(i, acc);
  }
  return fn;
}

}  // namespace regrecon
