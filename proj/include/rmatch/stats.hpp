#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rmatch {

struct Comparison {
  double theory_value = 0.0;
  double relative_deviation = 0.0;  // |mean - theory| / |theory|
  double z_score = 0.0;             // (mean - theory) / standard_error
};

struct Summary {
  static constexpr std::array<double, 7> kQuantileLevels{0.01, 0.05, 0.25, 0.5,
                                                         0.75, 0.95, 0.99};
  std::size_t trials_ok = 0;
  std::size_t trials_infeasible = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for fewer than two values
  double standard_error = 0.0;
  std::array<double, 7> quantiles{};
  std::optional<Comparison> comparison;
};

/// Values are sorted before any arithmetic, so the result does not depend on
/// their order.
Summary summarize(std::vector<double> values, std::size_t infeasible,
                  std::optional<double> theory = std::nullopt);

/// Linear-interpolation quantile of sorted data (R type 7).
double quantile_sorted(std::span<const double> sorted, double level);

/// Upper tail Pr(X >= x) of the chi-square distribution with df degrees.
double chi_square_sf(double x, double df);

/// Kolmogorov-Smirnov distance of a sample from the exponential(rate) CDF.
double ks_statistic_exponential(std::vector<double> sample, double rate);

/// Asymptotic KS critical value sqrt(-log(alpha / 2) / 2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

}  // namespace rmatch
