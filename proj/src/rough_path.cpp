#include "regrecon/rough_path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace regrecon {

int truncation_for(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("rough path: alpha in (0,1)");
  const int N = static_cast<int>(std::floor(1.0 / alpha + 1e-12));
  if (std::abs(N * alpha - 1.0) < 1e-12)
    throw std::invalid_argument("rough path: N*alpha = 1 is excluded");
  if (N > 3) throw std::invalid_argument("rough path: N > 3 (alpha <= 1/4) not supported");
  return N;
}

// ------------------------------------------------------------- path files

void write_path_csv(std::ostream& out, const PathSamples& p) {
  out.precision(17);
  out << "t";
  for (int j = 0; j < p.dim(); ++j) out << ",X" << j + 1;
  out << "\n";
  for (long i = p.first; i < p.first + p.size(); ++i) {
    out << p.lattice.point(i);
    for (int j = 0; j < p.dim(); ++j) out << "," << p.at(j, i);
    out << "\n";
  }
}

PathSamples read_path_csv(std::istream& in, const Lattice& lat) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("path file: empty");
  const int d = static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (d < 1) throw std::invalid_argument("path file: no components");
  PathSamples p{lat, 0, std::vector<std::vector<double>>(d)};
  long expect = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const long i = lat.index(std::stod(cell));
    if (first) {
      p.first = expect = i;
      first = false;
    }
    if (i != expect) throw std::invalid_argument("path file: times must be consecutive lattice points");
    ++expect;
    for (int j = 0; j < d; ++j) {
      if (!std::getline(ss, cell, ',')) throw std::invalid_argument("path file: short row");
      p.components[j].push_back(std::stod(cell));
    }
  }
  if (first) throw std::invalid_argument("path file: no samples");
  return p;
}

// -------------------------------------------------------- rough path type

BranchedRoughPath::BranchedRoughPath(double alpha, AlgebraPtr alg, Lattice lat, long first,
                                     std::vector<Char> values)
    : alpha_(alpha), alg_(std::move(alg)), lat_(lat), first_(first), x_(std::move(values)) {
  if (x_.empty()) throw std::invalid_argument("rough path: empty grid");
  for (double v : x_.front().tree_values())
    if (v != 0) throw std::invalid_argument("rough path: not normalized at the first time");
  inv_.reserve(x_.size());
  for (const auto& c : x_) inv_.push_back(hopf::char_inverse(c));
}

std::size_t BranchedRoughPath::check(long i) const {
  if (i < first_ || i >= first_ + static_cast<long>(x_.size()))
    throw std::out_of_range("rough path: time outside the grid");
  return static_cast<std::size_t>(i - first_);
}

Char BranchedRoughPath::increment(long s, long t) const {
  return hopf::char_product(inverse_at(s), at(t));
}

double BranchedRoughPath::increment_value(long s, long t, int forest) const {
  return increment(s, t).forest_value(forest);
}

double BranchedRoughPath::holder_statistic(const PairSample& pairs) const {
  const auto r = range();
  const int F = static_cast<int>(alg_->forests().size());
  double worst = 0;
  for (long s : pairs.xs) {
    if (!r.contains(s)) continue;
    for (long o : pairs.offsets) {
      if (!r.contains(s + o) || !pairs.window.contains(s + o)) continue;
      const Char inc = increment(s, s + o);
      const double h = std::abs(static_cast<double>(o)) * lat_.step();
      for (int f = 1; f < F; ++f)
        worst = std::max(worst, std::abs(inc.forest_value(f)) /
                                    std::pow(h, alpha_ * alg_->forest_nodes(f)));
    }
  }
  return worst;
}

void BranchedRoughPath::dump(std::ostream& out, long stride) const {
  out.precision(17);
  out << "t,forest,value\n";
  const int F = static_cast<int>(alg_->forests().size());
  for (std::size_t i = 0; i < x_.size(); i += static_cast<std::size_t>(stride))
    for (int f = 1; f < F; ++f)
      out << lat_.point(first_ + static_cast<long>(i)) << ",\"" << hopf::to_string(alg_->forests()[f])
          << "\"," << x_[i].forest_value(f) << "\n";
}

// ------------------------------------------------------------------ lift

namespace {

constexpr int kDeg = 4;  // polynomials in θ of degree <= 3
using Poly = std::array<double, kDeg>;

struct TreeShape {
  int label;  // 1-based
  std::vector<int> children;
};

std::vector<TreeShape> shapes(const hopf::TruncatedAlgebra& alg) {
  std::vector<TreeShape> out;
  for (const auto& t : alg.trees()) {
    TreeShape s{t.label(), {}};
    for (const auto& c : t.children()) s.children.push_back(alg.tree_index(c));
    out.push_back(std::move(s));
  }
  return out;
}

// Advances tree values a (= ⟨X_{u,s}, ·⟩) across one linear segment with increments dx.
void advance(const std::vector<TreeShape>& sh, std::vector<double>& a, std::vector<Poly>& P,
             std::span<const double> dx) {
  for (std::size_t t = 0; t < sh.size(); ++t) {
    Poly prod{};
    prod[0] = 1;
    for (int c : sh[t].children) {
      Poly next{};
      for (int i = 0; i < kDeg; ++i)
        for (int k = 0; i + k < kDeg; ++k) next[i + k] += prod[i] * P[c][k];
      prod = next;
    }
    Poly p{};
    p[0] = a[t];
    const double d = dx[sh[t].label - 1];
    for (int i = 0; i + 1 < kDeg; ++i) p[i + 1] = d * prod[i] / (i + 1);
    P[t] = p;
  }
  for (std::size_t t = 0; t < sh.size(); ++t) {
    double v = 0;
    for (double c : P[t]) v += c;
    a[t] = v;
  }
}

std::vector<std::vector<double>> integrate_values(const PathSamples& path,
                                                  const hopf::TruncatedAlgebra& alg, long u,
                                                  long t) {
  const auto sh = shapes(alg);
  std::vector<double> a(sh.size(), 0.0);
  std::vector<Poly> P(sh.size());
  std::vector<double> dx(path.dim());
  std::vector<std::vector<double>> out{a};
  for (long i = u; i < t; ++i) {
    for (int j = 0; j < path.dim(); ++j) dx[j] = path.at(j, i + 1) - path.at(j, i);
    advance(sh, a, P, dx);
    out.push_back(a);
  }
  return out;
}

}  // namespace

BranchedRoughPath lift_path(const PathSamples& path, double alpha, int N) {
  if (N == 0) N = truncation_for(alpha);
  if (N < 1 || N > 3) throw std::invalid_argument("lift: N must be 1, 2 or 3");
  if (path.dim() < 1) throw std::invalid_argument("lift: path without components");
  if (path.size() < 4 * (N + 1))
    throw std::invalid_argument("lift: N = " + std::to_string(N) + " too large for " +
                                std::to_string(path.size()) + " grid points");
  auto alg = hopf::make_algebra(path.dim(), N);
  const auto vals = integrate_values(path, *alg, path.first, path.first + path.size() - 1);
  std::vector<Char> xs;
  xs.reserve(vals.size());
  for (const auto& v : vals) xs.emplace_back(alg, v);
  return BranchedRoughPath(alpha, alg, path.lattice, path.first, std::move(xs));
}

Char integrate_increment(const PathSamples& path, const AlgebraPtr& alg, long u, long t) {
  if (t < u) return hopf::char_inverse(integrate_increment(path, alg, t, u));
  return Char(alg, integrate_values(path, *alg, u, t).back());
}

ChenReport chen_check(const BranchedRoughPath& X, const PathSamples& path, int triples,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto r = X.range();
  std::uniform_int_distribution<long> pick(r.first, r.last);
  const int F = static_cast<int>(X.algebra()->forests().size());
  ChenReport rep;
  rep.triples = triples;
  for (int n = 0; n < triples; ++n) {
    std::array<long, 3> p{pick(rng), pick(rng), pick(rng)};
    std::sort(p.begin(), p.end());
    const Char su = X.increment(p[0], p[1]), ut = X.increment(p[1], p[2]);
    const Char st = X.increment(p[0], p[2]);
    const Char prod = hopf::char_product(su, ut);
    const Char direct = integrate_increment(path, X.algebra(), p[0], p[2]);
    for (int f = 1; f < F; ++f) {
      rep.chen = std::max(rep.chen, std::abs(prod.forest_value(f) - st.forest_value(f)));
      rep.independent =
          std::max(rep.independent, std::abs(st.forest_value(f) - direct.forest_value(f)));
    }
  }
  return rep;
}

double rough_path_distance(const BranchedRoughPath& X, const BranchedRoughPath& Y,
                           const PairSample& pairs, double eps) {
  if (X.N() != Y.N() || X.d() != Y.d() || X.alpha() != Y.alpha() ||
      X.lattice().level != Y.lattice().level)
    throw std::invalid_argument("rough path distance: mismatched truncation or grid");
  const auto rx = X.range(), ry = Y.range();
  auto inside = [&](long i) { return rx.contains(i) && ry.contains(i); };
  const auto& alg = *X.algebra();
  const int F = static_cast<int>(alg.forests().size());
  double worst = 0;
  for (long s : pairs.xs) {
    if (!inside(s)) continue;
    for (long o : pairs.offsets) {
      if (!inside(s + o) || !pairs.window.contains(s + o)) continue;
      const Char a = X.increment(s, s + o), b = Y.increment(s, s + o);
      const double h = std::abs(static_cast<double>(o)) * X.lattice().step();
      if (!(h < 1)) continue;
      for (int f = 1; f < F; ++f)
        worst = std::max(worst, std::abs(a.forest_value(f) - b.forest_value(f)) /
                                    std::pow(h, X.alpha() * alg.forest_nodes(f) - eps));
    }
  }
  return worst;
}

// ------------------------------------------------------- controlled paths

ControlledPath::ControlledPath(AlgebraPtr alg, Lattice lat, long first, long count)
    : alg_(std::move(alg)), lat_(lat), first_(first), count_(count),
      z_(static_cast<std::size_t>(count) * alg_->forests().size(), 0.0) {
  if (count < 1) throw std::invalid_argument("controlled path: empty grid");
}

std::size_t ControlledPath::slot(long i) const {
  if (i < first_ || i >= first_ + count_)
    throw std::out_of_range("controlled path: time outside the grid");
  return static_cast<std::size_t>(i - first_);
}

void ControlledPath::set(long i, int forest, double v) {
  if (v != 0 && alg_->forest_nodes(forest) > alg_->N() - 1)
    throw std::invalid_argument("controlled path: coefficient on a forest with N nodes");
  z_[slot(i) * forests() + forest] = v;
}

ControlledPath ControlledPath::scaled(double s) const {
  ControlledPath out = *this;
  for (auto& v : out.z_) v *= s;
  return out;
}

ControlledPath controlled_function(const BranchedRoughPath& X, const PathSamples& path, int j,
                                   const SmoothFunction& g) {
  const auto& alg = *X.algebra();
  if (j < 1 || j > alg.d()) throw std::invalid_argument("controlled path: label out of range");
  if (g.order < alg.N() - 1) throw std::invalid_argument("controlled path: g not smooth enough");
  const auto r = X.range();
  ControlledPath Z(X.algebra(), X.lattice(), r.first, r.size());
  std::vector<int> power_forest{0};
  for (int k = 1; k <= alg.N() - 1; ++k)
    power_forest.push_back(alg.forest_index(hopf::Forest(std::vector<hopf::Tree>(k, hopf::Tree(j)))));
  for (long i = r.first; i <= r.last; ++i) {
    const double x = path.at(j - 1, i);
    double fact = 1;
    for (int k = 0; k <= alg.N() - 1; ++k) {
      if (k > 0) fact *= k;
      Z.set(i, power_forest[k], g.d(k, x) / fact);
    }
  }
  return Z;
}

double transported_coefficient(const ControlledPath& Z, const Char& Xst, long s, int tau) {
  const auto& alg = *Z.algebra();
  double acc = 0;
  for (int sigma = 0; sigma < Z.forests(); ++sigma) {
    const double zs = Z(s, sigma);
    if (zs == 0) continue;
    for (const auto& term : alg.coproduct_terms(sigma))
      if (term.right == tau) acc += zs * static_cast<double>(term.coef) * Xst.forest_value(term.left);
  }
  return acc;
}

ControlledNorm controlled_norm(const ControlledPath& Z, const BranchedRoughPath& X,
                               const PairSample& pairs) {
  const auto& alg = *Z.algebra();
  const int N = alg.N();
  const auto rz = Z.range(), rx = X.range();
  auto inside = [&](long i) { return rz.contains(i) && rx.contains(i); };
  ControlledNorm out;
  for (long i = rz.first; i <= rz.last; ++i)
    for (int f = 0; f < Z.forests(); ++f) out.sup = std::max(out.sup, std::abs(Z(i, f)));
  for (long s : pairs.xs) {
    if (!inside(s)) continue;
    for (long o : pairs.offsets) {
      if (!inside(s + o) || !pairs.window.contains(s + o)) continue;
      const Char Xst = X.increment(s, s + o);
      const double h = std::abs(static_cast<double>(o)) * X.lattice().step();
      for (int tau = 0; tau < Z.forests(); ++tau) {
        const int nodes = alg.forest_nodes(tau);
        if (nodes > N - 1) continue;
        const double rem = Z(s + o, tau) - transported_coefficient(Z, Xst, s, tau);
        out.remainder = std::max(out.remainder, std::abs(rem) / std::pow(h, (N - nodes) * X.alpha()));
      }
    }
  }
  return out;
}

// ------------------------------------------------------------- integrals

double rough_integral(const BranchedRoughPath& X, const ControlledPath& Z, long s, long t,
                      int n, int j) {
  if (!(t > s)) throw std::invalid_argument("rough integral: empty partition");
  const auto& alg = *X.algebra();
  const long step = X.lattice().steps(n);
  std::vector<long> pts{s};
  for (long k = s / step + 1; k * step < t; ++k)
    if (k * step > s) pts.push_back(k * step);
  pts.push_back(t);
  std::vector<std::pair<int, int>> slots;  // (τ, [τ]_j)
  for (int tau = 0; tau < Z.forests(); ++tau) {
    if (alg.forest_nodes(tau) > alg.N() - 1) continue;
    const int g = alg.graft_index(tau, j);
    if (g >= 0) slots.emplace_back(tau, g);
  }
  double acc = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const long u = pts[i], v = pts[i + 1];
    const Char inc = X.increment(u, v);
    for (auto [tau, g] : slots) acc += Z(u, tau) * inc.forest_value(g);
  }
  return acc;
}

IntegralTable rough_integral_table(const BranchedRoughPath& X, const ControlledPath& Z, long s,
                                   long t, const std::vector<int>& levels, int ref_level, int j,
                                   Exec exec) {
  if (levels.empty()) throw std::invalid_argument("integral table: no mesh levels");
  IntegralTable tab;
  auto vals = map_indices<double>(exec, levels.size() + 1, [&](std::size_t i) {
    return rough_integral(X, Z, s, t, i < levels.size() ? levels[i] : ref_level, j);
  });
  tab.reference = vals.back();
  vals.pop_back();
  tab.values = vals;
  tab.report.parameter = "mesh";
  tab.report.statistic = "error";
  std::vector<double> meshes;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    meshes.push_back(std::ldexp(1.0, -levels[i]));
    tab.report.params.push_back(meshes.back());
    tab.report.values.push_back(std::abs(vals[i] - tab.reference));
  }
  tab.report.in_fit.assign(levels.size(), true);
  tab.report.fit = fit_loglog(meshes, tab.report.values);
  tab.extrapolated = tab.reference;
  if (levels.size() >= 2 && std::isfinite(tab.report.fit.slope) && tab.report.fit.slope > 0) {
    // one Richardson step on the two finest tabulated meshes
    const double a = vals[vals.size() - 2], b = vals.back();
    const double ratio = std::pow(2.0, tab.report.fit.slope * (levels.back() - levels[levels.size() - 2]));
    tab.extrapolated = b + (b - a) / (ratio - 1.0);
  }
  return tab;
}

nlohmann::json IntegralTable::to_json() const {
  auto j = report.to_json();
  j["integral_values"] = values;
  j["reference"] = reference;
  j["extrapolated"] = extrapolated;
  return j;
}

// ------------------------------------------------------------ correspondence

namespace {

RegStructure branched_structure(const hopf::TruncatedAlgebra& alg, double alpha) {
  std::vector<BasisElement> basis;
  for (std::size_t f = 0; f < alg.forests().size(); ++f) {
    BasisElement e{hopf::to_string(alg.forests()[f]), alpha * alg.forest_nodes(static_cast<int>(f)), {}};
    if (f == 0) e.monomial = std::vector<int>{0};
    basis.push_back(std::move(e));
  }
  return RegStructure(std::move(basis), 1.0, Scaling::euclidean(1));
}

}  // namespace

RoughPathModel::RoughPathModel(std::shared_ptr<const BranchedRoughPath> X)
    : X_(std::move(X)), T_(branched_structure(*X_->algebra(), X_->alpha())) {
  if (T_.dim() > kMaxDim) throw std::invalid_argument("rough path model: too many forests");
}

double RoughPathModel::pi(double x, int tau, double y) const {
  const auto& lat = X_->lattice();
  return X_->increment_value(lat.index(x), lat.index(y), tau);
}

Mat RoughPathModel::gamma(double x, double y) const {
  const auto& lat = X_->lattice();
  const auto& alg = *X_->algebra();
  const Char Xyx = X_->increment(lat.index(y), lat.index(x));
  const int F = T_.dim();
  Mat M = Mat::Zero(F, F);
  for (int sigma = 0; sigma < F; ++sigma)
    for (const auto& term : alg.coproduct_terms(sigma))
      M(term.right, sigma) += static_cast<double>(term.coef) * Xyx.forest_value(term.left);
  return M;
}

void RoughPathModel::pi_row(double x, const Vec& v, const Lattice& lat, long first,
                            std::span<double> out) const {
  if (lat.level != X_->lattice().level) {
    ContinuousModel::pi_row(x, v, lat, first, out);
    return;
  }
  const Char& inv = X_->inverse_at(lat.index(x));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Char inc = hopf::char_product(inv, X_->at(first + static_cast<long>(i)));
    double acc = 0;
    for (int f = 0; f < T_.dim(); ++f)
      if (v[f] != 0) acc += v[f] * inc.forest_value(f);
    out[i] = acc;
  }
}

std::shared_ptr<const RoughPathModel> rp_to_model(std::shared_ptr<const BranchedRoughPath> X) {
  return std::make_shared<const RoughPathModel>(std::move(X));
}

ModelledDistribution controlled_to_md(const ControlledPath& Z, ModelPtr model) {
  const auto& alg = *Z.algebra();
  if (model->structure().dim() != Z.forests())
    throw std::invalid_argument("controlled path: model does not match the algebra");
  const double alpha = model->structure().level(alg.tree_as_forest(0));
  ModelledDistribution f(model, Z.lattice(), Z.range(), alg.N() * alpha);
  Vec v(Z.forests());
  for (long i = Z.range().first; i <= Z.range().last; ++i) {
    for (int k = 0; k < Z.forests(); ++k) v[k] = Z(i, k);
    f.set(i, v);
  }
  return f;
}

// ------------------------------------------------------- mollified paths

MollifiedRoughPath::MollifiedRoughPath(std::shared_ptr<const BranchedRoughPath> X,
                                       DiscreteMollifier phi)
    : X_(std::move(X)), phi_(std::move(phi)) {
  const auto r = X_->range();
  const long m = phi_.half_width();
  range_ = {r.first + m, r.last - m};
  if (range_.size() < 2) throw std::invalid_argument("mollified rough path: lambda under-resolved by the grid");
  t0_ = range_.first;
  const auto& alg = *X_->algebra();
  const int T = static_cast<int>(alg.trees().size());
  std::vector<std::vector<double>> raw(T, std::vector<double>(r.size()));
  for (long i = r.first; i <= r.last; ++i) {
    const Char inc = X_->increment(t0_, i);
    for (int t = 0; t < T; ++t) raw[t][i - r.first] = inc[t];
  }
  conv_.assign(T, std::vector<double>(range_.size()));
  for (int t = 0; t < T; ++t)
    for (long i = range_.first; i <= range_.last; ++i)
      conv_[t][i - range_.first] = phi_.apply(0, raw[t].data() + (i - r.first));
  std::vector<Char> vals;
  vals.reserve(range_.size());
  for (long i = range_.first; i <= range_.last; ++i) vals.push_back(increment(t0_, i));
  path_ = std::make_shared<const BranchedRoughPath>(X_->alpha(), X_->algebra(), X_->lattice(),
                                                    range_.first, std::move(vals));
}

Char MollifiedRoughPath::increment(long s, long t) const {
  if (!range_.contains(s) || !range_.contains(t))
    throw std::out_of_range("mollified rough path: time outside the resolved range");
  const auto& alg = *X_->algebra();
  const Char Xs0 = X_->increment(s, t0_);
  Char out(X_->algebra());
  for (std::size_t tau = 0; tau < alg.trees().size(); ++tau) {
    double acc = 0;
    for (const auto& term : alg.coproduct_terms(alg.tree_as_forest(static_cast<int>(tau)))) {
      if (term.right == 0) continue;
      const int R = alg.forest_trees(term.right).front();
      acc += static_cast<double>(term.coef) * Xs0.forest_value(term.left) *
             (conv_[R][t - range_.first] - conv_[R][s - range_.first]);
    }
    out[static_cast<int>(tau)] = acc;
  }
  return out;
}

double MollifiedRoughPath::chen_residual(int triples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick(range_.first, range_.last);
  const int F = static_cast<int>(X_->algebra()->forests().size());
  double worst = 0;
  for (int n = 0; n < triples; ++n) {
    std::array<long, 3> p{pick(rng), pick(rng), pick(rng)};
    std::sort(p.begin(), p.end());
    const Char prod = hopf::char_product(increment(p[0], p[1]), increment(p[1], p[2]));
    const Char st = increment(p[0], p[2]);
    for (int f = 1; f < F; ++f)
      worst = std::max(worst, std::abs(prod.forest_value(f) - st.forest_value(f)));
  }
  return worst;
}

MollifiedRoughPath mollify_rough_path(std::shared_ptr<const BranchedRoughPath> X,
                                      const DiscreteMollifier& phi) {
  return MollifiedRoughPath(std::move(X), phi);
}

ControlledPath mollify_controlled_path(const ControlledPath& Z, const DiscreteMollifier& phi,
                                       bool additive) {
  const auto r = Z.range();
  const long m = phi.half_width();
  if (r.size() <= 2 * m + 1)
    throw std::invalid_argument("mollified controlled path: lambda under-resolved by the grid");
  std::vector<double> z(r.size());
  for (long i = r.first; i <= r.last; ++i) z[i - r.first] = Z.path(i);
  ControlledPath out(Z.algebra(), Z.lattice(), r.first + m, r.size() - 2 * m);
  for (long i = r.first + m; i <= r.last - m; ++i) {
    for (int f = 1; f < Z.forests(); ++f) out.set(i, f, Z(i, f));
    const double conv = phi.apply(0, z.data() + (i - r.first));
    out.set(i, 0, additive ? Z.path(i) + conv : conv);
  }
  return out;
}

MollifiedIntegralTable rough_integral_mollified(std::shared_ptr<const BranchedRoughPath> X,
                                                const ControlledPath& Z,
                                                const std::vector<double>& lambdas, int r,
                                                long s, long t, int j, Exec exec) {
  if (lambdas.empty()) throw std::invalid_argument("mollified integral: no lambdas");
  const Lattice& lat = X->lattice();
  const int L = lat.level;
  // cumulative finest-mesh integral G(u) = ∫_{first}^{u} Z dX
  const long g0 = std::max(X->range().first, Z.range().first);
  const long g1 = std::min(X->range().last, Z.range().last);
  std::vector<double> G(g1 - g0 + 1, 0.0);
  for (long i = g0; i < g1; ++i) G[i - g0 + 1] = G[i - g0] + rough_integral(*X, Z, i, i + 1, L, j);
  std::vector<double> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  auto rows = map_indices<MollifiedIntegralRow>(exec, sorted.size(), [&](std::size_t k) {
    const DiscreteMollifier phi(r, sorted[k], lat);
    const long m = phi.half_width();
    if (s - m < g0 || t + m > g1)
      throw std::invalid_argument("mollified integral: lambda too large for the interval");
    const MollifiedRoughPath Xl(X, phi);
    const ControlledPath Zl = mollify_controlled_path(Z, phi);
    MollifiedIntegralRow row{sorted[k], 0, 0, 0};
    row.value = s == t ? 0.0 : rough_integral(Xl.path(), Zl, s, t, L, j);
    row.target = phi.apply(0, G.data() + (t - g0)) - phi.apply(0, G.data() + (s - g0));
    row.error = std::abs(row.value - row.target);
    return row;
  });
  MollifiedIntegralTable tab;
  tab.rows = rows;
  tab.report.parameter = "lambda";
  tab.report.statistic = "error";
  tab.monotone = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    tab.report.params.push_back(rows[k].lambda);
    tab.report.values.push_back(rows[k].error);
    if (k > 0 && !(rows[k].error < rows[k - 1].error)) tab.monotone = false;
  }
  tab.report.in_fit.assign(rows.size(), true);
  if (rows.size() >= 2) tab.report.fit = fit_loglog(tab.report.params, tab.report.values);
  return tab;
}

nlohmann::json MollifiedIntegralTable::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"lambda", r.lambda}, {"value", r.value}, {"target", r.target}, {"error", r.error}});
  auto j = report.to_json();
  j["rows"] = rs;
  j["monotone"] = monotone;
  return j;
}

}  // namespace regrecon
