#include "regrecon/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace regrecon {

void ContinuousModel::pi_row(double x, const Vec& v, const Lattice& lat, long first,
                             std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = lat.point(first + static_cast<long>(i));
    double acc = 0;
    for (int t = 0; t < v.size(); ++t)
      if (v[t] != 0) acc += v[t] * pi(x, t, y);
    out[i] = acc;
  }
}

double ContinuousModel::pi(double x, const Vec& v, double y) const {
  double acc = 0;
  for (int t = 0; t < v.size(); ++t)
    if (v[t] != 0) acc += v[t] * pi(x, t, y);
  return acc;
}

// ------------------------------------------------------------ polynomial

PolynomialModel::PolynomialModel(RegStructure T) : T_(std::move(T)) {
  if (T_.scaling().dim() != 1) throw std::invalid_argument("polynomial model: d = 1 only");
  for (int i = 0; i < T_.dim(); ++i) {
    if (!T_.is_polynomial(i))
      throw std::invalid_argument("polynomial model: non-polynomial basis element " +
                                  T_.basis(i).label);
    degree_.push_back((*T_.basis(i).monomial)[0]);
  }
  for (const auto& k : monomials_below(T_.scaling(), T_.gamma()))
    if (T_.monomial_index(k) < 0)
      throw std::invalid_argument("polynomial model: missing monomial of degree " +
                                  std::to_string(k[0]));
}

double PolynomialModel::pi(double x, int tau, double y) const {
  return std::pow(y - x, degree_[tau]);
}

ModelPtr polynomial_model(const RegStructure& T) { return std::make_shared<PolynomialModel>(T); }

// ---------------------------------------------------------------- Hölder

HolderModel::HolderModel(double alpha, double gamma, Fn f, Fn h, Lattice lat, IndexRange window)
    : alpha_(alpha),
      T_(holder_structure(alpha, gamma)),
      f_(std::move(f)),
      h_(std::move(h)),
      lat_(lat),
      window_(window) {
  if (!h_) throw std::invalid_argument("holder model: h is required");
  hs_.resize(window.size());
  fs_.resize(window.size(), 1.0);
  for (long i = 0; i < window.size(); ++i) {
    const double y = lat.point(window.first + i);
    hs_[i] = h_(y);
    if (f_) fs_[i] = f_(y);
    if (!std::isfinite(hs_[i]) || !std::isfinite(fs_[i]))
      throw std::invalid_argument("holder model: non-finite sample of f or h");
  }
}

double HolderModel::h(double x) const {
  if (lat_.on_lattice(x)) {
    long i = lat_.index(x);
    if (window_.contains(i)) return hs_[i - window_.first];
  }
  return h_(x);
}

double HolderModel::f(double x) const {
  if (!f_) return 1.0;
  if (lat_.on_lattice(x)) {
    long i = lat_.index(x);
    if (window_.contains(i)) return fs_[i - window_.first];
  }
  return f_(x);
}

double HolderModel::pi(double x, int tau, double y) const {
  return tau == 0 ? f(y) : (h(y) - h(x)) * f(y);
}

Mat HolderModel::gamma(double x, double y) const {
  Mat M = Mat::Identity(2, 2);
  M(0, 1) = h(x) - h(y);
  return M;
}

void HolderModel::pi_row(double x, const Vec& v, const Lattice& lat, long first,
                         std::span<double> out) const {
  if (lat.level != lat_.level || !window_.contains(first) ||
      !window_.contains(first + static_cast<long>(out.size()) - 1)) {
    ContinuousModel::pi_row(x, v, lat, first, out);
    return;
  }
  const double hx = h(x);
  const double* hs = hs_.data() + (first - window_.first);
  const double* fs = fs_.data() + (first - window_.first);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (v[0] + v[1] * (hs[i] - hx)) * fs[i];
}

// ------------------------------------------------------- star extension

namespace {

RegStructure extend_structure(const RegStructure& core, double gamma,
                              std::vector<std::pair<int, int>>& factors,
                              std::vector<int>& core_deg) {
  if (core.scaling().dim() != 1) throw std::invalid_argument("star extension: d = 1 only");
  core_deg.assign(core.dim(), -1);
  for (int i = 0; i < core.dim(); ++i)
    if (core.is_polynomial(i)) core_deg[i] = (*core.basis(i).monomial)[0];
  const int unit = core.unit_index();
  std::vector<BasisElement> basis;
  for (int k = 0; k < gamma - 1e-12; ++k) {
    basis.push_back({k == 0 ? "1" : "X^" + std::to_string(k), static_cast<double>(k),
                     std::vector<int>{k}});
    factors.emplace_back(k, unit);
  }
  for (int i = 0; i < core.dim(); ++i) {
    if (core_deg[i] >= 0) continue;
    for (int k = 0; k + core.level(i) < gamma - 1e-12; ++k) {
      std::string lab = k == 0 ? core.basis(i).label
                               : "X^" + std::to_string(k) + "*" + core.basis(i).label;
      basis.push_back({lab, k + core.level(i), std::nullopt});
      factors.emplace_back(k, i);
    }
  }
  return RegStructure(std::move(basis), gamma, core.scaling());
}

}  // namespace

StarExtendedModel::StarExtendedModel(ModelPtr core, double gamma)
    : core_(std::move(core)),
      T_(extend_structure(core_->structure(), gamma, factors_, core_poly_degree_)) {
  if (core_->structure().min_level() < 0)
    throw std::invalid_argument("star extension: negative levels are not supported");
  max_k_ = static_cast<int>(std::ceil(gamma)) + 1;
  index_.assign(max_k_ + 1, std::vector<int>(core_->structure().dim(), -1));
  for (int i = 0; i < T_.dim(); ++i) {
    auto [k, c] = factors_[i];
    if (c == core_->structure().unit_index()) {
      // X^k: also reachable as X^{k-m} ⋆ X^m for core polynomials X^m
      for (int cc = 0; cc < core_->structure().dim(); ++cc) {
        int m = core_poly_degree_[cc];
        if (m >= 0 && m <= k) index_[k - m][cc] = i;
      }
    } else {
      index_[k][c] = i;
    }
  }
}

int StarExtendedModel::product_index(int k, int core_index) const {
  if (k < 0 || k > max_k_) return -1;
  return index_[k][core_index];
}

double StarExtendedModel::pi(double x, int tau, double y) const {
  auto [k, c] = factors_[tau];
  return std::pow(y - x, k) * core_->pi(x, c, y);
}

void StarExtendedModel::pi_row(double x, const Vec& v, const Lattice& lat, long first,
                               std::span<double> out) const {
  // Group by polynomial degree k: Π_x v = Σ_k (y - x)^k Π_x(core part of degree k).
  const int cd = core_->structure().dim();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> tmp(out.size());
  for (int k = 0; k <= max_k_; ++k) {
    Vec cv = Vec::Zero(cd);
    bool any = false;
    for (int i = 0; i < T_.dim(); ++i) {
      auto [ki, ci] = factors_[i];
      if (ki == k && v[i] != 0) {
        cv[ci] += v[i];
        any = true;
      }
    }
    if (!any) continue;
    core_->pi_row(x, cv, lat, first, tmp);
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] += std::pow(lat.point(first + static_cast<long>(j)) - x, k) * tmp[j];
  }
}

Vec StarExtendedModel::star_monomial(int k, const Vec& v) const {
  Vec out = Vec::Zero(T_.dim());
  for (int i = 0; i < T_.dim(); ++i) {
    if (v[i] == 0) continue;
    auto [ki, ci] = factors_[i];
    int j = product_index(k + ki, ci);
    if (j >= 0) out[j] += v[i];
  }
  return out;
}

Vec StarExtendedModel::star(std::span<const double> p, const Vec& v) const {
  Vec out = Vec::Zero(T_.dim());
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] != 0) out += p[k] * star_monomial(static_cast<int>(k), v);
  return out;
}

Vec StarExtendedModel::from_core(const Vec& v) const {
  Vec out = Vec::Zero(T_.dim());
  for (int c = 0; c < v.size(); ++c) {
    if (v[c] == 0) continue;
    int j = product_index(0, c);
    if (j >= 0) out[j] += v[c];
  }
  return out;
}

Mat StarExtendedModel::gamma(double x, double y) const {
  const Mat G = core_->gamma(x, y);
  const int n = T_.dim();
  Mat M = Mat::Zero(n, n);
  const double h = x - y;
  for (int col = 0; col < n; ++col) {
    auto [k, c] = factors_[col];
    // Γ(X^k ⋆ σ) = Σ_l C(k,l) h^{k-l} X^l ⋆ Γσ
    double binom = 1;
    for (int l = k; l >= 0; --l) {
      const double coef = binom * std::pow(h, k - l);
      for (int r = 0; r < G.rows(); ++r) {
        if (G(r, c) == 0) continue;
        int j = product_index(l, r);
        if (j >= 0) M(j, col) += coef * G(r, c);
      }
      binom = binom * l / (k - l + 1);
    }
  }
  return M;
}

// -------------------------------------------------------------- corrupted

CorruptedModel::CorruptedModel(ModelPtr base, int row, int col, double delta)
    : base_(std::move(base)), row_(row), col_(col), delta_(delta) {}

Mat CorruptedModel::gamma(double x, double y) const {
  Mat M = base_->gamma(x, y);
  if (x != y) M(row_, col_) += delta_;
  return M;
}

// ----------------------------------------------------------- estimators

std::vector<long> strided(IndexRange r, long stride) {
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  std::vector<long> v;
  for (long i = r.first; i <= r.last; i += stride) v.push_back(i);
  return v;
}

int shell_of(long offset, const Lattice& lat) {
  // |h| in [2^{-n-1}, 2^{-n}) with |h| = |offset| Δ
  long a = std::labs(offset);
  int lg = 0;
  while ((2L << lg) <= a) ++lg;  // 2^lg <= a < 2^{lg+1}
  return lat.level - lg - 1;
}

PairSample make_pair_sample(Lattice lat, IndexRange window, long x_stride, long per_shell_cap,
                            int min_shell) {
  PairSample ps{lat, window, strided(window, x_stride), {}};
  for (int n = std::max(0, min_shell); n < lat.level; ++n) {
    const long lo = 1L << (lat.level - n - 1), hi = (1L << (lat.level - n)) - 1;
    const long count = hi - lo + 1;
    std::vector<long> offs;
    if (per_shell_cap <= 0 || count <= per_shell_cap) {
      for (long o = lo; o <= hi; ++o) offs.push_back(o);
    } else {
      for (long i = 0; i < per_shell_cap; ++i) offs.push_back(lo + i * (count - 1) / (per_shell_cap - 1));
      offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
    }
    for (long o : offs) {
      ps.offsets.push_back(o);
      ps.offsets.push_back(-o);
    }
  }
  return ps;
}

double weakened_level(double zeta, double eps) {
  return is_integer_level(zeta) ? zeta : zeta - eps;
}

double admissible_eps_bound(const RegStructure& T, double gamma) {
  double best = std::numeric_limits<double>::infinity();
  for (double a : T.levels_below(gamma)) {
    if (is_integer_level(a)) continue;
    for (int n = 0; n < gamma - 1e-12; ++n) best = std::min(best, std::abs(a - n));
  }
  return best;
}

namespace {

struct CellKey {
  std::vector<double> levels;
  int scales;
  std::size_t at(int l, int s) const { return static_cast<std::size_t>(l) * scales + s; }
};

void merge_max(std::vector<SeminormCell>& into, const std::vector<SeminormCell>& from) {
  for (std::size_t i = 0; i < into.size(); ++i)
    if (from[i].ratio > into[i].ratio) into[i] = from[i];
}

double cells_max(const std::vector<SeminormCell>& cells) {
  double m = 0;
  for (const auto& c : cells) m = std::max(m, c.ratio);
  return m;
}

}  // namespace

SeminormReport estimate_pi_seminorm(const ContinuousModel& A, const ContinuousModel* B,
                                    double gamma, double eps, const ScaleFamily& fam,
                                    std::span<const long> xs, Exec exec) {
  const RegStructure& T = A.structure();
  if (B && B->structure().dim() != T.dim())
    throw std::invalid_argument("seminorm: models on different structures");
  const auto levels = T.levels_below(gamma);
  const int S = static_cast<int>(fam.scales().size());
  const Lattice& lat = fam.lattice();
  const long M = fam.max_half_width();
  CellKey key{levels, S};

  std::vector<SeminormCell> blank(levels.size() * S);
  for (std::size_t l = 0; l < levels.size(); ++l)
    for (int s = 0; s < S; ++s) blank[key.at(static_cast<int>(l), s)] = {levels[l], fam.scales()[s]};

  auto per_x = map_indices<std::vector<SeminormCell>>(exec, xs.size(), [&](std::size_t ix) {
    std::vector<SeminormCell> cells = blank;
    const long xi = xs[ix];
    const double x = lat.point(xi);
    std::vector<double> ga(2 * M + 1), gb(2 * M + 1);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double expo = weakened_level(levels[l], eps);
      for (int tau : T.indices_at(levels[l])) {
        Vec e = Vec::Zero(T.dim());
        e[tau] = 1;
        A.pi_row(x, e, lat, xi - M, ga);
        if (B) {
          B->pi_row(x, e, lat, xi - M, gb);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] -= gb[i];
        }
        for (double v : ga)
          if (!std::isfinite(v)) throw std::runtime_error("seminorm: non-finite model sample");
        for (int s = 0; s < S; ++s) {
          const long m = fam.half_width(s);
          const double norm = std::pow(fam.delta(s), expo);
          for (int p = 0; p < fam.profile_count(); ++p) {
            const auto& w = fam.weights(s, p);
            double acc = 0;
            for (long o = -m; o <= m; ++o) acc += ga[M + o] * w[o + m];
            const double ratio = std::abs(acc) / norm;
            auto& c = cells[key.at(static_cast<int>(l), s)];
            if (ratio > c.ratio) {
              c.ratio = ratio;
              c.x = x;
              c.tau = tau;
              c.profile = p;
            }
          }
        }
      }
    }
    return cells;
  });
  SeminormReport rep;
  rep.pi_cells = blank;
  for (const auto& c : per_x) merge_max(rep.pi_cells, c);
  rep.pi_norm = cells_max(rep.pi_cells);
  return rep;
}

SeminormReport estimate_gamma_seminorm(const ContinuousModel& A, const ContinuousModel* B,
                                       double gamma, double eps, const PairSample& pairs,
                                       Exec exec) {
  const RegStructure& T = A.structure();
  const auto levels = T.levels_below(gamma);
  const Lattice& lat = pairs.lattice;
  const int S = lat.level;
  CellKey key{levels, S};
  std::vector<SeminormCell> blank(levels.size() * S);
  for (std::size_t l = 0; l < levels.size(); ++l)
    for (int s = 0; s < S; ++s) blank[key.at(static_cast<int>(l), s)] = {levels[l], s};
  std::vector<int> level_of(T.dim());
  for (int i = 0; i < T.dim(); ++i)
    level_of[i] = static_cast<int>(std::find_if(levels.begin(), levels.end(), [&](double z) {
                                     return std::abs(z - T.level(i)) < 1e-12;
                                   }) - levels.begin());

  auto per_x = map_indices<std::vector<SeminormCell>>(exec, pairs.xs.size(), [&](std::size_t ix) {
    std::vector<SeminormCell> cells = blank;
    const long xi = pairs.xs[ix];
    const double x = lat.point(xi);
    for (long o : pairs.offsets) {
      const long yi = xi + o;
      if (!pairs.window.contains(yi)) continue;
      const double y = lat.point(yi);
      const double dist = std::abs(x - y);
      const int shell = shell_of(o, lat);
      Mat G = A.gamma(x, y);
      if (B) G -= B->gamma(x, y);
      for (int tau = 0; tau < T.dim(); ++tau) {
        const int l = level_of[tau];
        if (l >= static_cast<int>(levels.size())) continue;
        const double expo = weakened_level(levels[l], eps);
        for (int beta = 0; beta < T.dim(); ++beta) {
          if (!(T.level(beta) < levels[l] - 1e-12)) continue;
          const double v = G(beta, tau);
          if (!std::isfinite(v)) throw std::runtime_error("seminorm: non-finite Γ entry");
          const double ratio = std::abs(v) / std::pow(dist, expo - T.level(beta));
          auto& c = cells[key.at(l, shell)];
          if (ratio > c.ratio) {
            c.ratio = ratio;
            c.x = x;
            c.y = y;
            c.tau = tau;
            c.profile = beta;
          }
        }
      }
    }
    return cells;
  });
  SeminormReport rep;
  rep.gamma_cells = blank;
  for (const auto& c : per_x) merge_max(rep.gamma_cells, c);
  rep.gamma_norm = cells_max(rep.gamma_cells);
  return rep;
}

SeminormReport estimate_model_seminorm(const ContinuousModel& A, double gamma,
                                       const ScaleFamily& fam, std::span<const long> xs,
                                       const PairSample& pairs, Exec exec) {
  SeminormReport r = estimate_pi_seminorm(A, nullptr, gamma, 0.0, fam, xs, exec);
  SeminormReport g = estimate_gamma_seminorm(A, nullptr, gamma, 0.0, pairs, exec);
  r.gamma_cells = std::move(g.gamma_cells);
  r.gamma_norm = g.gamma_norm;
  return r;
}

SeminormReport weakened_seminorm(const ContinuousModel& A, const ContinuousModel& B,
                                 double gamma, double eps, const ScaleFamily& fam,
                                 std::span<const long> xs, const PairSample& pairs, Exec exec) {
  if (eps < 0) throw std::invalid_argument("weakened seminorm: eps >= 0");
  const double bound = admissible_eps_bound(A.structure(), gamma);
  if (eps > 0 && eps >= bound)
    throw std::invalid_argument("weakened seminorm: eps = " + std::to_string(eps) +
                                " must be below the level distance " + std::to_string(bound));
  SeminormReport r = estimate_pi_seminorm(A, &B, gamma, eps, fam, xs, exec);
  SeminormReport g = estimate_gamma_seminorm(A, &B, gamma, eps, pairs, exec);
  r.gamma_cells = std::move(g.gamma_cells);
  r.gamma_norm = g.gamma_norm;
  return r;
}

double model_distance(const ContinuousModel& A, const ContinuousModel& B,
                      const ScaleFamily& fam, std::span<const long> xs, const PairSample& pairs,
                      Exec exec) {
  const double top = A.structure().levels().back();
  double d = 0;
  for (int n = 0;; ++n) {
    SeminormReport r = estimate_pi_seminorm(A, &B, n, 0.0, fam, xs, exec);
    SeminormReport g = estimate_gamma_seminorm(A, &B, n, 0.0, pairs, exec);
    const double s = r.pi_norm + g.gamma_norm;
    const double term = s / (1 + s);
    if (n > top) {
      // every later truncation sees all of A: Σ_{m>=n} 2^{-m} = 2^{1-n}
      d += std::ldexp(term, 1 - n);
      break;
    }
    d += std::ldexp(term, -n);
  }
  return d;
}

AlgebraicResidual check_algebraic(const ContinuousModel& Z, const Lattice& lat,
                                  IndexRange window, int samples, std::uint64_t seed,
                                  int eval_points) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick(window.first, window.last);
  const RegStructure& T = Z.structure();
  AlgebraicResidual res;
  for (int s = 0; s < samples; ++s) {
    const double x = lat.point(pick(rng)), y = lat.point(pick(rng)), z = lat.point(pick(rng));
    const Mat Gxy = Z.gamma(x, y);
    res.gamma = std::max(res.gamma, (Gxy * Z.gamma(y, z) - Z.gamma(x, z)).cwiseAbs().maxCoeff());
    for (int e = 0; e < eval_points; ++e) {
      const double yp = lat.point(pick(rng));
      for (int tau = 0; tau < T.dim(); ++tau) {
        Vec col = Gxy.col(tau);
        res.pi = std::max(res.pi, std::abs(Z.pi(x, col, yp) - Z.pi(y, tau, yp)));
      }
    }
  }
  return res;
}

void dump_model_samples(std::ostream& out, const ContinuousModel& Z, std::span<const double> xs,
                        std::span<const double> ys) {
  out << "tau,x,y,value\n";
  out.precision(17);
  for (int tau = 0; tau < Z.structure().dim(); ++tau)
    for (double x : xs)
      for (double y : ys)
        out << Z.structure().basis(tau).label << "," << x << "," << y << "," << Z.pi(x, tau, y)
            << "\n";
}

nlohmann::json SeminormReport::to_json() const {
  auto table = [](const std::vector<SeminormCell>& cells) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : cells)
      a.push_back({{"level", c.level}, {"scale", c.scale}, {"ratio", c.ratio}, {"x", c.x},
                   {"y", c.y}, {"tau", c.tau}, {"profile_or_beta", c.profile}});
    return a;
  };
  return {{"pi_norm", pi_norm},
          {"gamma_norm", gamma_norm},
          {"total", total()},
          {"pi_cells", table(pi_cells)},
          {"gamma_cells", table(gamma_cells)}};
}

}  // namespace regrecon
