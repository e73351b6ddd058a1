#ifndef TWOSTREAM_SPECIAL_MATH_HPP_
#define TWOSTREAM_SPECIAL_MATH_HPP_

#include <span>

namespace twostream {

// Special functions used by every density and weight in the library.
// All of them throw std::domain_error outside their domain; none of them
// keep state, so they may be called concurrently.

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Logarithmic derivative of Gamma, psi(x) = Gamma'(x) / Gamma(x), x > 0.
double digamma(double x);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta(double a, double b);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double reg_incomplete_gamma_upper(double s, double x);

/// Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x).
double reg_incomplete_gamma_lower(double s, double x);

/// Asymptotic Kolmogorov survival function P(K > t), where t is the KS
/// statistic already scaled by sqrt(n).
double kolmogorov_sf(double t);

/// ln(exp(a) + exp(b)) without overflow; -inf inputs are allowed.
double log_add_exp(double a, double b);

/// ln(sum exp(v_i)); returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

/// 1 / (1 + exp(x)), stable for any finite or infinite x.
double logistic_complement(double x);

}  // namespace twostream

#endif  // TWOSTREAM_SPECIAL_MATH_HPP_
