#include "rmatch/theory.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "rmatch/error.hpp"

namespace rmatch::theory {

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

double harmonic_asymptotic(std::size_t n) {
  if (n == 0) throw InvalidArgument("harmonic_asymptotic needs n >= 1");
  const auto x = static_cast<double>(n);
  return std::log(x) + kEulerGamma + 1.0 / (2.0 * x);
}

double parisi_sum(std::size_t n) {
  if (n == 0) throw InvalidArgument("parisi_sum needs n >= 1");
  // Smallest terms first.
  double s = 0.0;
  for (std::size_t k = n; k >= 1; --k) {
    const auto x = static_cast<double>(k);
    s += 1.0 / (x * x);
  }
  return s;
}

namespace {

// H_n - H_{n-r} = sum_{i=0}^{r-1} 1/(n - i), ascending magnitude.
double harmonic_tail(std::size_t n, std::size_t r) {
  double s = 0.0;
  for (std::size_t k = n; k > n - r; --k) s += 1.0 / static_cast<double>(k);
  return s;
}

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
}

}  // namespace

double expected_increment(std::size_t n, std::size_t r, double p) {
  if (r < 1 || r > n) throw InvalidArgument("expected_increment needs 1 <= r <= n");
  check_p(p);
  return harmonic_tail(n, r) / (static_cast<double>(r) * p);
}

double pnr_theory(std::size_t n, std::size_t r, double p) {
  if (r > n) throw InvalidArgument("pnr_theory needs r <= n");
  check_p(p);
  return harmonic_tail(n, r) / p;
}

double pnr_finite_lambda(std::size_t n, std::size_t r, double p, double lambda) {
  if (r > n) throw InvalidArgument("pnr_finite_lambda needs r <= n");
  check_p(p);
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  // 1 - prod(1 + lambda / nu_j)^-1 via log1p/expm1 to keep small lambda exact.
  double log_stay = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    log_stay -= std::log1p(lambda / (p * static_cast<double>(n - j)));
  }
  return -std::expm1(log_stay) / lambda;
}

double double_sum(std::size_t n, std::size_t m) {
  if (m >= n) throw InvalidArgument("double_sum needs 0 <= m < n");
  // Inner sum for r is H_n - H_{n-r}; grow it one term at a time.
  double inner = 0.0;
  double total = 0.0;
  for (std::size_t r = 1; r <= n - m; ++r) {
    inner += 1.0 / static_cast<double>(n - r + 1);
    total += inner / static_cast<double>(r);
  }
  return total;
}

std::size_t default_cutoff(std::size_t n) {
  if (n < 3) return 0;
  const double l = std::log(static_cast<double>(n));
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) / (l * l)));
}

double lower_L(std::size_t n, std::size_t r) {
  if (2 * r > n) throw InvalidArgument("lower_L needs 2r <= n");
  double s = 0.0;
  for (std::size_t k = n - 2 * r + 1; k <= n; ++k) s += 1.0 / static_cast<double>(k);
  return s;
}

double upper_U(std::size_t n, std::size_t r) {
  if (2 * r > n) throw InvalidArgument("upper_U needs 2r <= n");
  double s = 0.0;
  for (std::size_t t = r; t >= 1; --t) s += 2.0 / static_cast<double>(n - 2 * t + 1);
  return s;
}

double mlim_integrand(double alpha) {
  return std::log((1.0 - alpha) / alpha) / (1.0 - alpha);
}

double mlim_integral(double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  // tanh-sinh copes with the logarithmic endpoint singularity at 0.
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(
      [](double a) { return mlim_integrand(a); }, 0.0, 0.5,
      std::sqrt(std::numeric_limits<double>::epsilon()), &error, &l1);
  if (!(error <= tolerance) || !std::isfinite(value)) {
    throw NumericError("mlim_integral: error estimate " + std::to_string(error) +
                       " exceeds tolerance");
  }
  return value;
}

double mlim_integral_substituted(double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  // y e^{-y} / (1 + e^{-y}) avoids overflow of e^y.
  const double value = integrator.integrate(
      [](double y) {
        const double t = std::exp(-y);
        return y * t / (1.0 + t);
      },
      0.0, std::numeric_limits<double>::infinity(),
      std::sqrt(std::numeric_limits<double>::epsilon()), &error, &l1);
  if (!(error <= tolerance) || !std::isfinite(value)) {
    throw NumericError("mlim_integral_substituted: error estimate " + std::to_string(error) +
                       " exceeds tolerance");
  }
  return value;
}

double alternating_zeta2(std::size_t terms) {
  double s = 0.0;
  for (std::size_t j = terms; j >= 1; --j) {
    const auto x = static_cast<double>(j);
    const double term = 1.0 / (x * x);
    s += (j % 2 == 1) ? term : -term;
  }
  return s;
}

}  // namespace rmatch::theory
