#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hklab {

/// Outcome of a numerical check: per-parameter values, a headline estimate and named extras in
/// insertion order.
struct CheckReport {
  std::string name;
  std::vector<double> params;
  std::vector<double> values;
  double estimate = 0.0;
  double error = 0.0;  // standard error or numerical tolerance attached to `estimate`
  double spread = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool inconclusive = false;
  std::string note;
  std::vector<std::pair<std::string, double>> metrics;

  void add(std::string key, double value) { metrics.emplace_back(std::move(key), value); }
  double metric(const std::string& key, double fallback = 0.0) const {
    for (const auto& [k, v] : metrics)
      if (k == key) return v;
    return fallback;
  }
};

/// max/min of positive values; +inf when some value is not positive.
double spread_of(const std::vector<double>& values);

/// Ordinary least-squares fit y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hklab
