#include "regrecon/structures.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace regrecon {

Scaling::Scaling(std::vector<int> s) : s_(std::move(s)) {
  if (s_.empty()) throw std::invalid_argument("scaling: empty");
  for (int v : s_) {
    if (v < 1) throw std::invalid_argument("scaling: entries must be positive integers");
    total_ += v;
  }
}

double Scaling::norm(std::span<const double> x) const {
  double n = 0;
  for (int i = 0; i < dim(); ++i) n = std::max(n, std::pow(std::abs(x[i]), 1.0 / s_[i]));
  return n;
}

int Scaling::degree(std::span<const int> k) const {
  int n = 0;
  for (int i = 0; i < dim(); ++i) n += s_[i] * k[i];
  return n;
}

bool is_integer_level(double z) { return std::abs(z - std::round(z)) < 1e-12; }

// ------------------------------------------------------------ RegStructure

RegStructure::RegStructure(std::vector<BasisElement> basis, double gamma, Scaling scaling)
    : basis_(std::move(basis)), gamma_(gamma), scaling_(std::move(scaling)) {
  if (basis_.empty()) throw std::invalid_argument("structure: empty basis");
  if (dim() > kMaxDim) throw std::invalid_argument("structure: dimension exceeds kMaxDim");
  for (const auto& b : basis_) {
    if (!std::isfinite(b.level)) throw std::invalid_argument("structure: non-finite level");
    if (b.monomial) {
      if (static_cast<int>(b.monomial->size()) != scaling_.dim())
        throw std::invalid_argument("structure: monomial of wrong dimension");
      if (std::abs(scaling_.degree(*b.monomial) - b.level) > 1e-12)
        throw std::invalid_argument("structure: monomial " + b.label + " at wrong level");
    }
    levels_.push_back(b.level);
  }
  std::sort(levels_.begin(), levels_.end());
  levels_.erase(std::unique(levels_.begin(), levels_.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                levels_.end());
  by_level_.resize(levels_.size());
  for (int i = 0; i < dim(); ++i)
    for (std::size_t l = 0; l < levels_.size(); ++l)
      if (std::abs(levels_[l] - basis_[i].level) < 1e-12) by_level_[l].push_back(i);
}

std::vector<double> RegStructure::levels_below(double gamma) const {
  std::vector<double> out;
  for (double z : levels_)
    if (z < gamma - 1e-12) out.push_back(z);
  return out;
}

const std::vector<int>& RegStructure::indices_at(double level) const {
  for (std::size_t l = 0; l < levels_.size(); ++l)
    if (std::abs(levels_[l] - level) < 1e-12) return by_level_[l];
  static const std::vector<int> none;
  return none;
}

int RegStructure::monomial_index(std::span<const int> k) const {
  for (int i = 0; i < dim(); ++i)
    if (basis_[i].monomial && std::equal(k.begin(), k.end(), basis_[i].monomial->begin(),
                                         basis_[i].monomial->end()))
      return i;
  return -1;
}

int RegStructure::unit_index() const {
  std::vector<int> zero(scaling_.dim(), 0);
  int i = monomial_index(zero);
  if (i < 0) throw std::logic_error("structure has no unit element");
  return i;
}

bool RegStructure::satisfies_polynomial_assumption() const {
  for (const auto& b : basis_)
    if (is_integer_level(b.level) && !b.monomial) return false;
  for (const auto& k : monomials_below(scaling_, gamma_))
    if (monomial_index(k) < 0) return false;
  return true;
}

double RegStructure::level_norm(const Vec& v, double z) const {
  double n = 0;
  for (int i : indices_at(z)) n = std::max(n, std::abs(v[i]));
  return n;
}

std::vector<std::vector<int>> monomials_below(const Scaling& s, double gamma) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(s.dim(), 0);
  // Enumerate the box of multi-indices with s_i k_i < gamma.
  std::function<void(int)> rec = [&](int axis) {
    if (axis == s.dim()) {
      if (s.degree(k) < gamma - 1e-12) out.push_back(k);
      return;
    }
    for (k[axis] = 0; s[axis] * k[axis] < gamma - 1e-12; ++k[axis]) rec(axis + 1);
    k[axis] = 0;
  };
  rec(0);
  std::stable_sort(out.begin(), out.end(),
                   [&](const auto& a, const auto& b) { return s.degree(a) < s.degree(b); });
  return out;
}

namespace {

std::string monomial_label(const std::vector<int>& k) {
  if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) return "1";
  std::string s = "X^";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s;
}

}  // namespace

RegStructure polynomial_structure(const Scaling& s, double gamma) {
  std::vector<BasisElement> basis;
  for (auto& k : monomials_below(s, gamma))
    basis.push_back({monomial_label(k), static_cast<double>(s.degree(k)), k});
  return RegStructure(std::move(basis), gamma, s);
}

RegStructure holder_structure(double alpha, double gamma) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("holder structure: alpha in (0,1)");
  return RegStructure({{"1", 0.0, std::vector<int>{0}}, {"tau", alpha, std::nullopt}}, gamma,
                      Scaling::euclidean(1));
}

bool is_graded_unipotent(const RegStructure& T, const Mat& M, double tol) {
  for (int r = 0; r < T.dim(); ++r)
    for (int c = 0; c < T.dim(); ++c) {
      double target = r == c ? 1.0 : 0.0;
      bool same = std::abs(T.level(r) - T.level(c)) < 1e-12;
      if ((same || T.level(r) > T.level(c)) && std::abs(M(r, c) - target) > tol) return false;
    }
  return true;
}

Mat poly_gamma(const RegStructure& T, std::span<const double> x, std::span<const double> y) {
  const int n = T.dim(), d = T.scaling().dim();
  Mat M = Mat::Identity(n, n);
  for (int c = 0; c < n; ++c) {
    if (!T.is_polynomial(c)) continue;
    const auto& k = *T.basis(c).monomial;
    M(c, c) = 0;
    // (X + (x-y))^k = Σ_{l<=k} Π_i C(k_i, l_i) (x_i-y_i)^{k_i-l_i} X^l
    std::vector<int> l(d, 0);
    std::function<void(int, double)> rec = [&](int axis, double coef) {
      if (axis == d) {
        int r = T.monomial_index(l);
        if (r < 0) throw std::logic_error("poly_gamma: missing monomial");
        M(r, c) += coef;
        return;
      }
      double binom = 1;
      for (l[axis] = 0; l[axis] <= k[axis]; ++l[axis]) {
        rec(axis + 1, coef * binom * std::pow(x[axis] - y[axis], k[axis] - l[axis]));
        binom = binom * (k[axis] - l[axis]) / (l[axis] + 1);
      }
      l[axis] = 0;
    };
    rec(0, 1.0);
  }
  return M;
}

Mat poly_gamma(const RegStructure& T, double x, double y) {
  return poly_gamma(T, std::span<const double>(&x, 1), std::span<const double>(&y, 1));
}

// ------------------------------------------------------------- profiles

double PolyProfile::derivative(int m, double y) const {
  if (y <= -1.0 || y >= 1.0) return 0.0;
  double acc = 0;
  for (int i = static_cast<int>(coef_.size()) - 1; i >= m; --i) {
    double f = coef_[i];
    for (int j = 0; j < m; ++j) f *= i - j;
    acc = acc * y + f;
  }
  return acc;
}

PolyProfile PolyProfile::differentiated(int m) const {
  std::vector<double> c = coef_;
  for (int t = 0; t < m; ++t) {
    if (c.size() <= 1) return PolyProfile({0.0});
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    c = std::move(d);
  }
  return PolyProfile(std::move(c));
}

PolyProfile PolyProfile::scaled(double s) const {
  std::vector<double> c = coef_;
  for (auto& v : c) v *= s;
  return PolyProfile(std::move(c));
}

double PolyProfile::integral() const {
  double acc = 0;
  for (std::size_t i = 0; i < coef_.size(); i += 2) acc += 2.0 * coef_[i] / (i + 1.0);
  return acc;
}

double PolyProfile::sup_abs() const {
  auto raw = [&](double y) {
    double acc = 0;
    for (int i = static_cast<int>(coef_.size()) - 1; i >= 0; --i) acc = acc * y + coef_[i];
    return acc;
  };
  PolyProfile dp = differentiated();
  auto draw = [&](double y) {
    const auto& c = dp.coef_;
    double acc = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * y + c[i];
    return acc;
  };
  double best = std::max(std::abs(raw(-1.0)), std::abs(raw(1.0)));
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    double a = -1.0 + 2.0 * i / n, b = -1.0 + 2.0 * (i + 1) / n;
    double fa = draw(a), fb = draw(b);
    best = std::max(best, std::abs(raw(a)));
    if (fa == 0) continue;
    if ((fa < 0) != (fb < 0)) {
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b), fm = draw(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      best = std::max(best, std::abs(raw(0.5 * (a + b))));
    }
  }
  return best;
}

namespace {

PolyProfile bump_polynomial(int power) {
  // (1 - y^2)^power expanded in y
  std::vector<double> c(2 * power + 1, 0.0);
  double binom = 1;
  for (int i = 0; i <= power; ++i) {
    c[2 * i] = (i % 2 ? -1.0 : 1.0) * binom;
    binom = binom * (power - i) / (i + 1);
  }
  return PolyProfile(std::move(c));
}

double cr_norm(const PolyProfile& p, int r) {
  double n = 0;
  for (int m = 0; m <= r; ++m) n = std::max(n, p.differentiated(m).sup_abs());
  return n;
}

}  // namespace

PolyProfile make_bump(int r) {
  if (r < 1) throw std::invalid_argument("make_bump: r >= 1");
  PolyProfile q = bump_polynomial(r + 1);
  return q.scaled(1.0 / cr_norm(q, r));
}

std::vector<PolyProfile> make_test_family(int r) {
  if (r < 1) throw std::invalid_argument("make_test_family: r >= 1");
  PolyProfile q = bump_polynomial(r + 1);
  std::vector<PolyProfile> fam;
  for (int m = 0; m <= r; ++m) {
    PolyProfile p = q.differentiated(m);
    fam.push_back(p.scaled(1.0 / cr_norm(p, r)));
  }
  return fam;
}

PolyProfile mollifier_profile(int r) {
  if (r < 1) throw std::invalid_argument("mollifier_profile: r >= 1");
  PolyProfile q = bump_polynomial(r + 1);
  return q.scaled(1.0 / q.integral());
}

double TestFunction::operator()(std::span<const double> y) const {
  double r2 = 0, jac = 1;
  for (int i = 0; i < scaling.dim(); ++i) {
    double h = std::pow(delta, scaling[i]);
    double u = (y[i] - center[i]) / h;
    r2 += u * u;
    jac /= h;
  }
  return jac * (*profile)(std::sqrt(r2));
}

// ----------------------------------------------------------- dyadic grids

DyadicGrid::DyadicGrid(int level, Scaling s, std::vector<double> lo, std::vector<double> hi)
    : level_(level), s_(std::move(s)), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (static_cast<int>(lo_.size()) != s_.dim() || static_cast<int>(hi_.size()) != s_.dim())
    throw std::invalid_argument("dyadic grid: box dimension mismatch");
}

double DyadicGrid::spacing(int axis) const { return std::ldexp(1.0, -level_ * s_[axis]); }

std::vector<std::vector<double>> DyadicGrid::points() const {
  std::vector<std::vector<double>> out{{}};
  for (int a = 0; a < s_.dim(); ++a) {
    double h = spacing(a);
    long k0 = static_cast<long>(std::ceil(lo_[a] / h - 1e-9));
    long k1 = static_cast<long>(std::floor(hi_[a] / h + 1e-9));
    std::vector<std::vector<double>> next;
    for (const auto& p : out)
      for (long k = k0; k <= k1; ++k) {
        auto q = p;
        q.push_back(k * h);
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

bool DyadicGrid::contains(std::span<const double> x) const {
  for (int a = 0; a < s_.dim(); ++a) {
    double u = x[a] / spacing(a);
    if (std::abs(u - std::round(u)) > 1e-9 || x[a] < lo_[a] - 1e-12 || x[a] > hi_[a] + 1e-12)
      return false;
  }
  return true;
}

// ----------------------------------------------------- partition of unity

PartitionOfUnity::PartitionOfUnity(int n, int b) : n_(n), B_(bump_polynomial(b)) {
  if (n < 0) throw std::invalid_argument("partition: level n >= 0");
  if (b < 3) throw std::invalid_argument("partition: bump power >= 3 for C^2 derivatives");
}

double PartitionOfUnity::spacing() const { return std::ldexp(1.0, -n_); }

std::vector<long> PartitionOfUnity::active(double x) const {
  double u = x / spacing();
  long f = static_cast<long>(std::floor(u));
  if (u == static_cast<double>(f)) return {f};
  return {f, f + 1};
}

double PartitionOfUnity::derivative(int m, long k, double x) const {
  if (m < 0 || m > 2) throw std::invalid_argument("partition: derivative order <= 2");
  const double u = x / spacing();
  double S[3] = {0, 0, 0};
  for (long kk : active(x))
    for (int i = 0; i <= m; ++i) S[i] += B_.derivative(i, u - kk);
  const double b0 = B_.derivative(0, u - k), b1 = B_.derivative(1, u - k),
               b2 = B_.derivative(2, u - k);
  double v;
  if (m == 0) {
    v = b0 / S[0];
  } else if (m == 1) {
    v = (b1 * S[0] - b0 * S[1]) / (S[0] * S[0]);
  } else {
    v = b2 / S[0] - 2 * b1 * S[1] / (S[0] * S[0]) - b0 * S[2] / (S[0] * S[0]) +
        2 * b0 * S[1] * S[1] / (S[0] * S[0] * S[0]);
  }
  return v * std::pow(std::ldexp(1.0, n_), m);
}

double PartitionOfUnity::value(std::span<const long> k, std::span<const double> x,
                               const Scaling& s) const {
  double v = 1;
  for (int a = 0; a < s.dim(); ++a) v *= PartitionOfUnity(n_ * s[a])(k[a], x[a]);
  return v;
}

// ----------------------------------------------------- descriptor files

namespace {

template <class T>
std::vector<T> split_list(const std::string& s) {
  std::vector<T> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    std::istringstream ts(tok);
    T v;
    if (!(ts >> v)) throw std::invalid_argument("structure descriptor: bad list entry '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

StructureDescriptor load_structure(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  pt::read_ini(in, tree);
  const auto& s = tree.get_child("structure");
  const int d = s.get<int>("d");
  auto scaling = split_list<int>(s.get<std::string>("scaling"));
  if (static_cast<int>(scaling.size()) != d)
    throw std::invalid_argument("structure.scaling: expected d entries");
  auto levels = split_list<double>(s.get<std::string>("levels"));
  auto dims = split_list<int>(s.get<std::string>("sector_dims"));
  auto labels = split_list<std::string>(s.get<std::string>("labels"));
  auto monos = split_list<std::string>(s.get<std::string>("monomials"));
  if (levels.size() != dims.size())
    throw std::invalid_argument("structure.sector_dims: one entry per level");
  std::size_t total = 0;
  for (int n : dims) total += n;
  if (labels.size() != total || monos.size() != total)
    throw std::invalid_argument("structure.labels/monomials: one entry per basis element");
  std::vector<BasisElement> basis;
  std::size_t b = 0;
  for (std::size_t l = 0; l < levels.size(); ++l)
    for (int i = 0; i < dims[l]; ++i, ++b) {
      BasisElement e{labels[b], levels[l], std::nullopt};
      if (monos[b] != "-") {
        std::vector<int> k;
        std::istringstream ms(monos[b]);
        std::string part;
        while (std::getline(ms, part, ',')) k.push_back(std::stoi(part));
        e.monomial = k;
      }
      basis.push_back(std::move(e));
    }
  return {RegStructure(std::move(basis), s.get<double>("gamma"), Scaling(scaling)),
          s.get<int>("r")};
}

void save_structure(std::ostream& out, const StructureDescriptor& desc) {
  const auto& T = desc.structure;
  out << "[structure]\n";
  out << "d = " << T.scaling().dim() << "\n";
  out << "scaling =";
  for (int v : T.scaling().values()) out << " " << v;
  out << "\ngamma = " << fmt(T.gamma()) << "\nr = " << desc.r << "\nlevels =";
  for (double z : T.levels()) out << " " << fmt(z);
  out << "\nsector_dims =";
  for (double z : T.levels()) out << " " << T.indices_at(z).size();
  out << "\nlabels =";
  for (double z : T.levels())
    for (int i : T.indices_at(z)) out << " " << T.basis(i).label;
  out << "\nmonomials =";
  for (double z : T.levels())
    for (int i : T.indices_at(z)) {
      out << " ";
      if (!T.is_polynomial(i)) {
        out << "-";
        continue;
      }
      const auto& k = *T.basis(i).monomial;
      for (std::size_t a = 0; a < k.size(); ++a) out << (a ? "," : "") << k[a];
    }
  out << "\n";
}

}  // namespace regrecon
