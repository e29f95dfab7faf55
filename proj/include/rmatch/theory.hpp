#pragma once

#include <cstddef>

namespace rmatch::theory {

inline constexpr double kPi = 3.141592653589793;
inline constexpr double kZeta2 = kPi * kPi / 6.0;   // 1.6449340668482264
inline constexpr double kHalfZeta2 = kZeta2 / 2.0;  // pi^2 / 12
inline constexpr double kEulerGamma = 0.5772156649015329;

/// H_n = sum_{i=1}^n 1/i, ascending order; harmonic(0) = 0.
double harmonic(std::size_t n);

/// log n + gamma + 1/(2n); the error against harmonic(n) is O(n^-2).
double harmonic_asymptotic(std::size_t n);

/// sum_{k=1}^n 1/k^2, the exact mean optimal assignment cost on K_{n,n}
/// with exponential(1) costs.
double parisi_sum(std::size_t n);

/// Mean increment C(n, r) - C(n, r - 1) for G_{n,n,p}:
///   (1 / (r p)) * (H_n - H_{n-r}).
/// Requires 1 <= r <= n, 0 < p <= 1.
double expected_increment(std::size_t n, std::size_t r, double p);

/// Normalized participation probability of the special vertex in the
/// optimal r-matching, (1/p) (1/n + ... + 1/(n - r + 1)).
double pnr_theory(std::size_t n, std::size_t r, double p);

/// (1/lambda) (1 - prod_{j<r} nu_j / (nu_j + lambda)), nu_j = p (n - j):
/// the participation probability before lambda -> 0, normalized. Exact
/// for the complete bipartite graph (p = 1).
double pnr_finite_lambda(std::size_t n, std::size_t r, double p, double lambda);

/// sum_{r=1}^{n-m} sum_{i=0}^{r-1} 1 / (r (n - i)), in O(n).
/// Requires 0 <= m < n.
double double_sum(std::size_t n, std::size_t m);

/// Default cutoff floor(n / (log n)^2); 0 for n < 3.
std::size_t default_cutoff(std::size_t n);

/// L(n, r) = sum_{s=1}^{2r} 1/(n - s + 1). Requires 2r <= n.
double lower_L(std::size_t n, std::size_t r);
/// U(n, r) = sum_{s=1}^{r} 2/(n - 2s + 1). Requires 2r <= n.
double upper_U(std::size_t n, std::size_t r);

/// Integrand (1/(1 - a)) log((1 - a)/a) on (0, 1/2].
double mlim_integrand(double alpha);

/// Adaptive quadrature of the integrand above over (0, 1/2]; the exact
/// value is pi^2/12. Throws NumericError if the error estimate stays above
/// tolerance.
double mlim_integral(double tolerance);

/// The same integral after y = log(1/a - 1): int_0^inf y / (e^y + 1) dy.
double mlim_integral_substituted(double tolerance);

/// sum_{j=1}^{terms} (-1)^{j+1} / j^2, summed from the small end.
double alternating_zeta2(std::size_t terms);

}  // namespace rmatch::theory
