#include "rmatch/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "rmatch/error.hpp"

namespace rmatch {

double quantile_sorted(std::span<const double> sorted, double level) {
  if (sorted.empty()) return 0.0;
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::vector<double> values, std::size_t infeasible,
                  std::optional<double> theory) {
  std::sort(values.begin(), values.end());
  Summary s;
  s.trials_ok = values.size();
  s.trials_infeasible = infeasible;
  if (!values.empty()) {
    double total = 0.0;
    for (double v : values) total += v;
    s.mean = total / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.variance = ss / static_cast<double>(values.size() - 1);
    }
    s.standard_error = std::sqrt(s.variance / static_cast<double>(values.size()));
    for (std::size_t i = 0; i < Summary::kQuantileLevels.size(); ++i) {
      s.quantiles[i] = quantile_sorted(values, Summary::kQuantileLevels[i]);
    }
  }
  if (theory) {
    Comparison c;
    c.theory_value = *theory;
    c.relative_deviation = *theory != 0.0 ? std::abs(s.mean - *theory) / std::abs(*theory) : 0.0;
    c.z_score = s.standard_error > 0.0 ? (s.mean - *theory) / s.standard_error : 0.0;
    s.comparison = c;
  }
  return s;
}

double chi_square_sf(double x, double df) {
  if (!(df > 0.0)) throw InvalidArgument("chi-square needs df > 0");
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

double ks_statistic_exponential(std::vector<double> sample, double rate) {
  if (sample.empty()) throw InvalidArgument("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = 1.0 - std::exp(-rate * sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace rmatch
