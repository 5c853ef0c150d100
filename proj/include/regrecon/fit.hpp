// Log-log rate fits and the (parameter, statistic) tables built on them.
#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace regrecon {

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
  double slope_stderr = 0;
  double ci_low = 0, ci_high = 0;  // 95% band on the slope
  int points = 0;
  nlohmann::json to_json() const;
};

// Least squares y = a + b x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log2 y against log2 x over the entries with y > 0.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceReport {
  std::string parameter;  // e.g. "lambda", "n", "mesh"
  std::string statistic;  // e.g. "distance"
  std::vector<double> params;
  std::vector<double> values;
  // Optional per-level breakdown: rows (param, level, value).
  struct LevelRow {
    double param, level, value;
  };
  std::vector<LevelRow> per_level;
  std::vector<bool> in_fit;  // entries used by the fit
  LinearFit fit;

  // Fraction of consecutive steps (in the order of params) where the statistic increases.
  double inversion_fraction() const;
  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

}  // namespace regrecon
