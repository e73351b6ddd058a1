#include "twostream/special_math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twostream {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void require_positive(double x, const char *fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(fn) + ": argument must be positive and finite, got " +
                            std::to_string(x));
  }
}

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients). Used on
// [0.5, 10); the Stirling series takes over above that.
double lanczos_log_gamma(double x) {
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  const double z = x - 1.0;
  double a = kCoef[0];
  for (std::size_t i = 1; i < kCoef.size(); ++i) {
    a += kCoef[i] / (z + static_cast<double>(i));
  }
  const double t = z + g + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_2k / (2k (2k-1) x^(2k-1)), k = 1..7
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series;
}

// Series representation of P(s, x); valid for x < s + 1.
double lower_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double ap = s;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) {
      break;
    }
  }
  return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
}

// Continued fraction for Q(s, x) (modified Lentz); valid for x >= s + 1.
double upper_continued_fraction(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      break;
    }
  }
  return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
}

void check_incomplete_args(double s, double x) {
  require_positive(s, "incomplete gamma (shape)");
  if (!(x >= 0.0) || std::isnan(x)) {
    throw std::domain_error("incomplete gamma: x must be non-negative");
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) {
    return log_gamma(x + 1.0) - std::log(x);
  }
  if (x < 10.0) {
    return lanczos_log_gamma(x);
  }
  return stirling_log_gamma(x);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
  return result + std::log(x) - 0.5 / x - tail;
}

double log_beta(double a, double b) {
  require_positive(a, "log_beta");
  require_positive(b, "log_beta");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double reg_incomplete_gamma_upper(double s, double x) {
  check_incomplete_args(s, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) {
    return std::clamp(1.0 - lower_series(s, x), 0.0, 1.0);
  }
  return std::clamp(upper_continued_fraction(s, x), 0.0, 1.0);
}

double reg_incomplete_gamma_lower(double s, double x) {
  check_incomplete_args(s, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) {
    return std::clamp(lower_series(s, x), 0.0, 1.0);
  }
  return std::clamp(1.0 - upper_continued_fraction(s, x), 0.0, 1.0);
}

double kolmogorov_sf(double t) {
  if (std::isnan(t) || t < 0.0) {
    throw std::domain_error("kolmogorov_sf: statistic must be non-negative");
  }
  if (t == 0.0) return 1.0;
  if (t < 1.0) {
    // The alternating series converges slowly near the origin; use the
    // theta-function form of the CDF there instead.
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double scale = std::sqrt(2.0 * std::numbers::pi) / t;
    double cdf = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * t * t));
      cdf += term;
      if (term < 1e-17) break;
    }
    return std::clamp(1.0 - scale * cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

double logistic_complement(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace twostream
