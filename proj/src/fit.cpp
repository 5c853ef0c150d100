#include "regrecon/fit.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace regrecon {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit: degenerate abscissae");
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0 ? 1 - sse / syy : 1.0;
  if (n > 2) {
    f.slope_stderr = std::sqrt(sse / (n - 2) / sxx);
    boost::math::students_t dist(static_cast<double>(n - 2));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    f.ci_low = f.slope - t * f.slope_stderr;
    f.ci_high = f.slope + t * f.slope_stderr;
  } else {
    f.ci_low = f.ci_high = f.slope;
  }
  return f;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0 && x[i] > 0 && std::isfinite(y[i])) {
      lx.push_back(std::log2(x[i]));
      ly.push_back(std::log2(y[i]));
    }
  if (lx.size() < 2) {
    LinearFit f;
    f.points = static_cast<int>(lx.size());
    f.slope = f.intercept = f.ci_low = f.ci_high = std::nan("");
    return f;
  }
  return fit_line(lx, ly);
}

nlohmann::json LinearFit::to_json() const {
  return {{"slope", slope},   {"intercept", intercept}, {"r2", r2},
          {"slope_stderr", slope_stderr}, {"slope_ci95", {ci_low, ci_high}}, {"points", points}};
}

double ConvergenceReport::inversion_fraction() const {
  if (values.size() < 2) return 0;
  int inv = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1]) ++inv;
  return static_cast<double>(inv) / (values.size() - 1);
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < params.size(); ++i)
    rows.push_back({{parameter, params[i]},
                    {statistic, values[i]},
                    {"in_fit", i < in_fit.size() ? static_cast<bool>(in_fit[i]) : true}});
  return {{"parameter", parameter}, {"statistic", statistic}, {"table", rows},
          {"fit", fit.to_json()}};
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out.precision(17);
  out << parameter << "," << statistic << ",level\n";
  for (std::size_t i = 0; i < params.size(); ++i)
    out << params[i] << "," << values[i] << ",all\n";
  for (const auto& r : per_level) out << r.param << "," << r.value << "," << r.level << "\n";
}

}  // namespace regrecon
