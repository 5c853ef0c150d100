#include "regrecon/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace regrecon {

GridFunction reconstruct(const ModelledDistribution& f) {
  const Lattice& lat = f.lattice();
  const auto r = f.range();
  GridFunction F{lat, r.first, std::vector<double>(r.size())};
  for (long i = r.first; i <= r.last; ++i) {
    const double y = lat.point(i);
    F.values[i - r.first] = f.model().pi(y, f.at(i), y);
  }
  return F;
}

const Vec& LocalAverages::at(long k) const {
  if (!has(k)) throw std::out_of_range("local averages: cell outside the computed range");
  return values[k - k_first];
}

LocalAverages local_averages(const ModelledDistribution& f, int n) {
  const Lattice& lat = f.lattice();
  if (n < 0 || n > lat.level - 2)
    throw std::invalid_argument("local averages: level " + std::to_string(n) +
                                " cells under-resolved by the lattice");
  const long step = lat.steps(n), c = step / 2;
  const auto r = f.range();
  // cells [x - c, x + c] inside the range, x = k * step
  const long k_lo = static_cast<long>(std::ceil(static_cast<double>(r.first + c) / step));
  const long k_hi = static_cast<long>(std::floor(static_cast<double>(r.last - c) / step));
  if (k_hi < k_lo) throw std::invalid_argument("local averages: range shorter than one cell");
  LocalAverages out{n, k_lo, {}};
  for (long k = k_lo; k <= k_hi; ++k) {
    const long xi = k * step;
    const double x = lat.point(xi);
    Vec acc = Vec::Zero(f.dim());
    for (long o = -c; o <= c; ++o) {
      const double w = (o == -c || o == c) ? 0.5 : 1.0;
      acc += w * (f.model().gamma(x, lat.point(xi + o)) * f.at(xi + o));
    }
    out.values.push_back(acc / static_cast<double>(2 * c));
  }
  return out;
}

AverageConsistency average_consistency(const ModelledDistribution& f, int n_lo, int n_hi,
                                       double gamma, double p, double q, int C) {
  if (n_hi <= n_lo) throw std::invalid_argument("average consistency: need n_lo < n_hi");
  const RegStructure& T = f.model().structure();
  const auto levels = T.levels_below(gamma);
  if (levels.empty()) throw std::invalid_argument("average consistency: empty level set");
  AverageConsistency out;
  out.C = C;
  out.report.parameter = "n";
  out.report.statistic = "shell";
  LocalAverages next = local_averages(f, n_lo);
  for (int n = n_lo; n <= n_hi; ++n) {
    const LocalAverages cur = next;
    next = local_averages(f, n + 1);
    const double hstep = std::ldexp(1.0, -(n + 1));
    double shell = 0;
    std::map<double, double> per_level;
    for (int m = -C; m <= C; ++m) {
      for (double z : levels) {
        double acc = 0;
        bool any = false;
        for (long k = cur.k_first; k < cur.k_first + static_cast<long>(cur.values.size()); ++k) {
          const long kk = 2 * k + m;  // x + h in Λ_{n+1} units
          if (!next.has(kk)) continue;
          const double x = std::ldexp(static_cast<double>(k), -n);
          const Vec d = cur.at(k) - f.model().gamma(x, x + m * hstep) * next.at(kk);
          const double v = T.level_norm(d, z) /
                           std::pow(2.0, -n * (gamma - z));
          acc = std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p);
          any = true;
        }
        if (!any) continue;
        const double val = std::isinf(p) ? acc : std::pow(acc * std::ldexp(1.0, -n), 1.0 / p);
        shell += val;
        per_level[z] += val;
      }
    }
    out.report.params.push_back(n);
    out.report.values.push_back(shell);
    for (auto [z, v] : per_level) out.report.per_level.push_back({static_cast<double>(n), z, v});
  }
  out.report.in_fit.assign(out.report.params.size(), true);
  // slope of log2 shell against n
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.report.params.size(); ++i)
    if (out.report.values[i] > 0) {
      xs.push_back(out.report.params[i]);
      ys.push_back(std::log2(out.report.values[i]));
    }
  if (xs.size() >= 2) {
    out.report.fit = fit_line(xs, ys);
  } else {
    out.report.fit.slope = std::nan("");
  }
  double acc = 0;
  for (double v : out.report.values) acc = std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q);
  out.q_statistic = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
  return out;
}

nlohmann::json AverageConsistency::to_json() const {
  auto j = report.to_json();
  j["q_statistic"] = q_statistic;
  j["C"] = C;
  j["decay_rate"] = -report.fit.slope;
  return j;
}

// -------------------------------------------------------- bound estimates

namespace {

template <class Sampler>
ReconBoundReport pairing_sweep(const ScaleFamily& fam, std::span<const long> xs, double gamma,
                               double p, double q, double eps, Exec exec, Sampler&& sample) {
  const Lattice& lat = fam.lattice();
  const long M = fam.max_half_width();
  const int S = static_cast<int>(fam.scales().size());
  const int P = fam.profile_count();
  auto per_x = map_indices<std::vector<double>>(exec, xs.size(), [&](std::size_t ix) {
    std::vector<double> d(2 * M + 1);
    sample(xs[ix], M, d);
    std::vector<double> out(static_cast<std::size_t>(S) * P);
    for (int s = 0; s < S; ++s) {
      const long m = fam.half_width(s);
      for (int pr = 0; pr < P; ++pr) {
        const auto& w = fam.weights(s, pr);
        double acc = 0;
        for (long o = -m; o <= m; ++o) acc += d[M + o] * w[o + m];
        out[static_cast<std::size_t>(s) * P + pr] = std::abs(acc);
      }
    }
    return out;
  });
  ReconBoundReport rep;
  rep.gamma = gamma;
  rep.eps = eps;
  rep.p = p;
  rep.q = q;
  rep.js = fam.scales();
  rep.sup_pairing.assign(S, 0.0);
  rep.sup_ratio.assign(S, 0.0);
  const long stride = xs.size() > 1 ? xs[1] - xs[0] : 1;
  std::vector<double> lp(S, 0.0);
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (int s = 0; s < S; ++s) {
      const double norm = std::pow(fam.delta(s), gamma - eps);
      double sup_eta = 0;
      for (int pr = 0; pr < P; ++pr) {
        const double v = per_x[ix][static_cast<std::size_t>(s) * P + pr];
        rep.rows.push_back({lat.point(xs[ix]), fam.scales()[s], pr, v, v / norm});
        rep.sup_pairing[s] = std::max(rep.sup_pairing[s], v);
        sup_eta = std::max(sup_eta, v / norm);
      }
      rep.sup_ratio[s] = std::max(rep.sup_ratio[s], sup_eta);
      lp[s] = std::isinf(p) ? std::max(lp[s], sup_eta) : lp[s] + std::pow(sup_eta, p);
    }
  }
  double acc = 0;
  for (int s = 0; s < S; ++s) {
    const double g = std::isinf(p) ? lp[s] : std::pow(lp[s] * lat.step() * stride, 1.0 / p);
    acc = std::isinf(q) ? std::max(acc, g) : acc + std::pow(g, q) * std::log(2.0);
  }
  rep.composite = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
  std::vector<double> deltas;
  for (int s = 0; s < S; ++s) deltas.push_back(fam.delta(s));
  rep.fit = fit_loglog(deltas, rep.sup_pairing);
  return rep;
}

void check_window(const ModelledDistribution& f, std::span<const long> xs, long M) {
  for (long x : xs)
    if (!f.range().contains(x - M) || !f.range().contains(x + M))
      throw std::out_of_range("reconstruction bound: test functions leave the sampled range");
}

}  // namespace

ReconBoundReport recon_bound(const ModelledDistribution& f, double gamma, const ScaleFamily& fam,
                             std::span<const long> xs, double p, double q, double eps,
                             Exec exec) {
  check_window(f, xs, fam.max_half_width());
  const GridFunction F = reconstruct(f);
  const Lattice& lat = f.lattice();
  return pairing_sweep(fam, xs, gamma, p, q, eps, exec,
                       [&](long xi, long M, std::vector<double>& d) {
                         f.model().pi_row(lat.point(xi), f.at(xi), lat, xi - M, d);
                         for (long o = -M; o <= M; ++o) d[M + o] = F.at(xi + o) - d[M + o];
                       });
}

ReconBoundReport recon_two_model_bound(const ModelledDistribution& f,
                                       const ModelledDistribution& fbar, double gamma,
                                       const ScaleFamily& fam, std::span<const long> xs,
                                       double p, double q, double eps, Exec exec) {
  const long M = fam.max_half_width();
  check_window(f, xs, M);
  check_window(fbar, xs, M);
  const GridFunction F = reconstruct(f), Fb = reconstruct(fbar);
  const Lattice& lat = f.lattice();
  return pairing_sweep(fam, xs, gamma, p, q, eps, exec,
                       [&](long xi, long M, std::vector<double>& d) {
                         std::vector<double> db(d.size());
                         f.model().pi_row(lat.point(xi), f.at(xi), lat, xi - M, d);
                         fbar.model().pi_row(lat.point(xi), fbar.at(xi), lat, xi - M, db);
                         for (long o = -M; o <= M; ++o)
                           d[M + o] = (F.at(xi + o) - d[M + o]) - (Fb.at(xi + o) - db[M + o]);
                       });
}

nlohmann::json ReconBoundReport::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t s = 0; s < js.size(); ++s)
    per.push_back({{"j", js[s]}, {"sup_pairing", sup_pairing[s]}, {"sup_ratio", sup_ratio[s]}});
  auto num = [](double v) -> nlohmann::json {
    return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
  };
  return {{"gamma", gamma},        {"eps", eps},  {"p", num(p)},        {"q", num(q)},
          {"composite", composite}, {"fit", fit.to_json()}, {"per_scale", per}};
}

void ReconBoundReport::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "x,j,profile,pairing,ratio\n";
  for (const auto& r : rows)
    out << r.x << "," << r.j << "," << r.profile << "," << r.pairing << "," << r.ratio << "\n";
}

// ----------------------------------------------------------- telescoping

StartLevel choose_n0(double delta, double support_radius) {
  if (!(delta > 0 && delta <= 1)) throw std::invalid_argument("choose_n0: delta in (0,1]");
  const int base = static_cast<int>(std::floor(-std::log2(delta)));
  for (int c = 0;; ++c) {
    const double cell = std::ldexp(1.0, -(base - c));
    // worst case |x - x0| = cell/2
    if (0.5 * cell + delta <= support_radius * cell) return {base - c, c};
  }
}

double telescoping_residual(const ModelledDistribution& f, long x, std::span<const long> ys,
                            int n0, int n1) {
  if (!(n0 < n1)) throw std::invalid_argument("telescoping: need N0 < N1");
  const Lattice& lat = f.lattice();
  const ContinuousModel& Z = f.model();
  std::vector<LocalAverages> avg;
  std::vector<PartitionOfUnity> part;
  for (int n = n0; n <= n1; ++n) {
    avg.push_back(local_averages(f, n));
    part.emplace_back(n);
  }
  const GridFunction F = reconstruct(f);
  const Vec fx = f.at(x);
  const double xp = lat.point(x);
  // A^n_k(y) = Π_k f̄^n(k) (y);  P_n(y) = Σ_k 1^n_k(y) A^n_k(y)
  auto P = [&](int n, double y, double Fy, double* s1) {
    const auto& a = avg[n - n0];
    const auto& pu = part[n - n0];
    double acc = 0, local = 0;
    for (long k : pu.active(y)) {
      const double w = pu(k, y);
      if (w == 0) continue;
      const double A = Z.pi(std::ldexp(static_cast<double>(k), -n), a.at(k), y);
      acc += w * A;
      local += w * (Fy - A);
    }
    if (s1) *s1 = local;
    return acc;
  };
  double worst = 0;
  for (long yi : ys) {
    const double y = lat.point(yi);
    const double Fy = F.at(yi);
    const double direct = Fy - Z.pi(xp, fx, y);
    double s1 = 0;
    const double p_top = P(n1, y, Fy, &s1);
    double s2 = 0;
    double prev = p_top;
    for (int n = n1 - 1; n >= n0; --n) {
      const double cur = P(n, y, Fy, nullptr);
      s2 += prev - cur;
      prev = cur;
    }
    const double s3 = prev - Z.pi(xp, fx, y);
    worst = std::max(worst, std::abs(s1 + s2 + s3 - direct));
  }
  return worst;
}

}  // namespace regrecon
