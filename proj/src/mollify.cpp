#include "regrecon/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace regrecon {

namespace {

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

DiscreteMollifier::DiscreteMollifier(int r, double lambda, Lattice lat)
    : r_(r), lambda_(lambda), lat_(lat) {
  if (r < 1) throw std::invalid_argument("mollifier: smoothness r >= 1");
  if (!(lambda > 0 && lambda < 1)) throw std::invalid_argument("mollifier: lambda in (0,1)");
  const double mm = lambda / lat.step();
  m_ = std::lround(mm);
  if (std::abs(mm - static_cast<double>(m_)) > 1e-9)
    throw std::invalid_argument("mollifier: lambda must be a multiple of the lattice step");
  if (m_ < 4)
    throw std::invalid_argument("mollifier: lambda = " + std::to_string(lambda) +
                                " is under-resolved (fewer than 4 lattice steps)");
  const PolyProfile phi = mollifier_profile(r);
  const double dx = lat.step();
  for (int k = 0; k <= r; ++k) {
    std::vector<double> w(2 * m_ + 1);
    double moment = 0;
    for (long o = -m_; o <= m_; ++o) {
      const double u = static_cast<double>(o) / static_cast<double>(m_);
      w[o + m_] = std::pow(lambda, -1.0 - k) * phi.derivative(k, u) * dx;
      moment += w[o + m_] * std::pow(-o * dx, k) / factorial(k);
    }
    for (auto& v : w) v /= moment;
    w_.push_back(std::move(w));
  }
}

const std::vector<double>& DiscreteMollifier::weights(int k) const {
  if (k < 0 || k > r_)
    throw std::invalid_argument("mollifier: derivative order " + std::to_string(k) +
                                " exceeds the profile smoothness");
  return w_[k];
}

double DiscreteMollifier::apply(int k, const double* gi) const {
  const auto& w = weights(k);
  double acc = 0;
  for (long o = -m_; o <= m_; ++o) acc += w[o + m_] * gi[-o];
  return acc;
}

GridFunction DiscreteMollifier::convolve(const GridFunction& g, int k) const {
  const auto r = g.range();
  if (r.size() <= 2 * m_) throw std::invalid_argument("mollifier: sample window too short");
  GridFunction out{g.lattice, r.first + m_, {}};
  for (long i = r.first + m_; i <= r.last - m_; ++i)
    out.values.push_back(apply(k, g.values.data() + (i - r.first)));
  return out;
}

double convolve_with_derivatives(const ContinuousModel& Z, const DiscreteMollifier& phi, int tau,
                                 double x, int k) {
  (void)phi.weights(k);
  const Lattice& lat = phi.lattice();
  const long xi = lat.index(x), m = phi.half_width();
  std::vector<double> g(2 * m + 1);
  Vec e = Vec::Zero(Z.structure().dim());
  e[tau] = 1;
  Z.pi_row(x, e, lat, xi - m, g);
  return phi.apply(k, g.data() + m);
}

// ------------------------------------------------------- mollified model

MollifiedModel::MollifiedModel(ModelPtr base, DiscreteMollifier phi, IndexRange window,
                               bool skip_j, Exec exec)
    : base_(std::move(base)), phi_(std::move(phi)), window_(window), skip_j_(skip_j) {
  const RegStructure& T = base_->structure();
  if (!T.satisfies_polynomial_assumption() || !base_->canonical_on_polynomials())
    throw std::invalid_argument(
        "mollify: the model must act canonically on a complete polynomial sector");
  const double need = std::max(std::abs(T.min_level()), T.gamma());
  if (!(phi_.smoothness() > need))
    throw std::invalid_argument("mollify: profile smoothness r = " +
                                std::to_string(phi_.smoothness()) + " must exceed " +
                                std::to_string(need));
  if (window.size() < 1) throw std::invalid_argument("mollify: empty window");
  const Lattice& lat = phi_.lattice();
  const long m = phi_.half_width();
  const int n = T.dim();
  x0_ = lat.point(window.first);

  kmax_ = 0;
  for (int t = 0; t < n; ++t)
    if (!T.is_polynomial(t))
      for (int k = 0; k < T.level(t) - 1e-12; ++k) kmax_ = std::max(kmax_, k);
  for (int k = 0; k <= kmax_; ++k) {
    std::vector<int> mono{k};
    poly_row_.push_back(T.monomial_index(mono));
  }
  for (int t = 0; t < n; ++t)
    if (!T.is_polynomial(t))
      for (int k = 0; k < T.level(t) - 1e-12; ++k)
        if (poly_row_[k] < 0)
          throw std::invalid_argument("mollify: J needs the monomial X^" + std::to_string(k));
  if (kmax_ > phi_.smoothness()) throw std::invalid_argument("mollify: r too small for J");

  // (D^k φ * Π_{x0} σ) on the window, for every σ and k.
  const long W = window.size();
  std::vector<std::vector<std::vector<double>>> conv(n, std::vector<std::vector<double>>(kmax_ + 1));
  for_each_index(exec, static_cast<std::size_t>(n), [&](std::size_t s) {
    std::vector<double> g(W + 2 * m);
    Vec e = Vec::Zero(n);
    e[static_cast<int>(s)] = 1;
    base_->pi_row(x0_, e, lat, window.first - m, g);
    for (double v : g)
      if (!std::isfinite(v)) throw std::runtime_error("mollify: non-finite model sample");
    for (int k = 0; k <= kmax_; ++k) {
      conv[s][k].resize(W);
      for (long i = 0; i < W; ++i) conv[s][k][i] = phi_.apply(k, g.data() + i + m);
    }
  });
  conv0_.resize(n);
  for (int s = 0; s < n; ++s) conv0_[s] = conv[s][0];

  c_.assign(static_cast<std::size_t>(W) * n * (kmax_ + 1), 0.0);
  if (skip_j_) return;
  for_each_index(exec, static_cast<std::size_t>(W), [&](std::size_t i) {
    const double x = lat.point(window.first + static_cast<long>(i));
    const Mat G = base_->gamma(x0_, x);
    for (int t = 0; t < n; ++t) {
      if (T.is_polynomial(t)) continue;
      for (int k = 0; k < T.level(t) - 1e-12; ++k) {
        double acc = 0;
        for (int s = 0; s < n; ++s)
          if (G(s, t) != 0) acc += G(s, t) * conv[s][k][i];
        c_[(i * n + t) * (kmax_ + 1) + k] = acc;
      }
    }
  });
}

long MollifiedModel::checked_index(double x) const {
  const long i = phi_.lattice().index(x);
  if (!window_.contains(i))
    throw std::out_of_range("mollified model: point " + std::to_string(x) +
                            " outside the evaluation window");
  return i;
}

const double* MollifiedModel::coeffs(long xi, int tau) const {
  const int n = structure().dim();
  return c_.data() + (static_cast<std::size_t>(xi - window_.first) * n + tau) * (kmax_ + 1);
}

Mat MollifiedModel::J(double x) const {
  const RegStructure& T = structure();
  const int n = T.dim();
  const long xi = checked_index(x);
  Mat M = Mat::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    if (T.is_polynomial(t)) continue;
    const double* c = coeffs(xi, t);
    double kf = 1;
    for (int k = 0; k < T.level(t) - 1e-12; ++k) {
      if (k > 0) kf *= k;
      M(poly_row_[k], t) = c[k] / kf;
    }
  }
  return M;
}

void MollifiedModel::pi_row(double x, const Vec& v, const Lattice& lat, long first,
                            std::span<double> out) const {
  const RegStructure& T = structure();
  const int n = T.dim();
  if (lat.level != phi_.lattice().level)
    throw std::invalid_argument("mollified model: lattice mismatch");
  const long xi = checked_index(x);
  const long last = first + static_cast<long>(out.size()) - 1;
  if (!window_.contains(first) || !window_.contains(last))
    throw std::out_of_range("mollified model: evaluation row outside the window");

  Vec vp = Vec::Zero(n), vn = Vec::Zero(n);
  for (int t = 0; t < n; ++t) (T.is_polynomial(t) ? vp : vn)[t] = v[t];
  if (vp.cwiseAbs().maxCoeff() > 0) {
    base_->pi_row(x, vp, lat, first, out);
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
  if (vn.cwiseAbs().maxCoeff() == 0) return;

  const Vec g = base_->gamma(x0_, x) * vn;
  for (int s = 0; s < n; ++s) {
    if (g[s] == 0) continue;
    const double* c0 = conv0_[s].data() + (first - window_.first);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[s] * c0[i];
  }
  // - Π_x J(x) v = - Σ_k (y - x)^k / k! Σ_τ v_τ c_k(x, τ)
  std::vector<double> poly(kmax_ + 1, 0.0);
  for (int t = 0; t < n; ++t) {
    if (vn[t] == 0) continue;
    const double* c = coeffs(xi, t);
    for (int k = 0; k < T.level(t) - 1e-12; ++k) poly[k] += vn[t] * c[k];
  }
  for (int k = 0; k <= kmax_; ++k) poly[k] /= std::tgamma(k + 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double h = lat.point(first + static_cast<long>(i)) - x;
    double acc = 0;
    for (int k = kmax_; k >= 0; --k) acc = acc * h + poly[k];
    out[i] -= acc;
  }
}

double MollifiedModel::pi(double x, int tau, double y) const {
  Vec e = Vec::Zero(structure().dim());
  e[tau] = 1;
  const Lattice& lat = phi_.lattice();
  double out = 0;
  pi_row(x, e, lat, lat.index(y), std::span<double>(&out, 1));
  return out;
}

Mat MollifiedModel::gamma(double x, double y) const {
  const Mat G = base_->gamma(x, y);
  if (skip_j_) return G;
  return G + J(x) * G - G * J(y);
}

// ---------------------------------------------------------------- studies

namespace {

void check_lambdas(const std::vector<double>& lambdas, std::size_t min_count) {
  if (lambdas.size() < min_count)
    throw std::invalid_argument("mollification study: need at least " +
                                std::to_string(min_count) + " lambda values");
  for (double l : lambdas)
    if (!(l > 0 && l < 1)) throw std::invalid_argument("mollification study: lambda in (0,1)");
}

void add_levels(ConvergenceReport& rep, double param, const SeminormReport& s) {
  std::map<double, double> by;
  for (const auto& c : s.pi_cells) by[c.level] = std::max(by[c.level], c.ratio);
  for (const auto& c : s.gamma_cells) by[c.level] = std::max(by[c.level], c.ratio);
  for (auto [l, v] : by) rep.per_level.push_back({param, l, v});
}

}  // namespace

double NormBoundReport::max_ratio() const {
  double m = 0;
  for (double v : report.values) m = std::max(m, v);
  return m;
}

nlohmann::json NormBoundReport::to_json() const {
  nlohmann::json j = report.to_json();
  j["pi_ratio"] = pi_ratio;
  j["gamma_ratio"] = gamma_ratio;
  j["summed_ratio"] = summed_ratio;
  j["max_ratio"] = max_ratio();
  return j;
}

NormBoundReport mollification_norm_bound(ModelPtr Z, const std::vector<double>& lambdas,
                                         double gamma, const MollifyStudySetup& setup,
                                         bool skip_j) {
  check_lambdas(lambdas, 1);
  const Lattice& lat = setup.family.lattice();
  const SeminormReport ref =
      estimate_model_seminorm(*Z, gamma, setup.family, setup.xs, setup.pairs, setup.exec);
  if (!(ref.pi_norm > 0) || !(ref.gamma_norm > 0))
    throw std::invalid_argument("norm bound: a component of the ‖Z‖ estimate vanishes");
  NormBoundReport out;
  ConvergenceReport& rep = out.report;
  rep.parameter = "lambda";
  rep.statistic = skip_j ? "norm_ratio_without_J" : "norm_ratio";
  for (double l : lambdas) {
    MollifiedModel Zl(Z, DiscreteMollifier(setup.r, l, lat), setup.window, skip_j, setup.exec);
    const SeminormReport s =
        estimate_model_seminorm(Zl, gamma, setup.family, setup.xs, setup.pairs, setup.exec);
    out.pi_ratio.push_back(s.pi_norm / ref.pi_norm);
    out.gamma_ratio.push_back(s.gamma_norm / ref.gamma_norm);
    out.summed_ratio.push_back(s.total() / ref.total());
    rep.params.push_back(l);
    rep.values.push_back(std::max(out.pi_ratio.back(), out.gamma_ratio.back()));
    add_levels(rep, l, s);
  }
  rep.in_fit.assign(rep.params.size(), true);
  if (rep.params.size() >= 2) rep.fit = fit_loglog(rep.params, rep.values);
  return out;
}

ConvergenceReport mollification_convergence(ModelPtr Z, const std::vector<double>& lambdas,
                                            double gamma, double eps,
                                            const MollifyStudySetup& setup) {
  check_lambdas(lambdas, 3);
  const Lattice& lat = setup.family.lattice();
  ConvergenceReport rep;
  rep.parameter = "lambda";
  rep.statistic = "distance";
  for (double l : lambdas) {
    MollifiedModel Zl(Z, DiscreteMollifier(setup.r, l, lat), setup.window, false, setup.exec);
    const SeminormReport s = weakened_seminorm(*Z, Zl, gamma, eps, setup.family, setup.xs,
                                               setup.pairs, setup.exec);
    rep.params.push_back(l);
    rep.values.push_back(s.total());
    add_levels(rep, l, s);
  }
  rep.in_fit.assign(rep.params.size(), true);
  rep.fit = fit_loglog(rep.params, rep.values);
  return rep;
}

}  // namespace regrecon
