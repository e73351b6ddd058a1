#include "twostream/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "twostream/special_math.hpp"

namespace twostream {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }
bool probability(double x) { return x >= 0.0 && x <= 1.0; }

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

void validate(const FreqParams &params) {
  if (!positive_finite(params.alpha1) || !positive_finite(params.alpha2) ||
      !positive_finite(params.beta) || !probability(params.p)) {
    throw std::invalid_argument("invalid frequency parameters: alpha1=" +
                                std::to_string(params.alpha1) +
                                " alpha2=" + std::to_string(params.alpha2) +
                                " beta=" + std::to_string(params.beta) +
                                " p=" + std::to_string(params.p));
  }
}

void validate(const SevParams &params) {
  if (!positive_finite(params.mu) || !positive_finite(params.delta) ||
      !positive_finite(params.sigma) || !probability(params.nu)) {
    throw std::invalid_argument("invalid severity parameters: mu=" + std::to_string(params.mu) +
                                " delta=" + std::to_string(params.delta) +
                                " sigma=" + std::to_string(params.sigma) +
                                " nu=" + std::to_string(params.nu));
  }
}

void validate(const SplitRate &split) {
  if (!(split.xi > 0.0 && split.xi <= 1.0)) {
    throw std::invalid_argument("split rate must lie in (0, 1]");
  }
}

double nb_log_pmf(double shape, double rate, std::uint64_t n) {
  if (!positive_finite(rate)) throw std::domain_error("nb_log_pmf: rate must be positive");
  const double k = static_cast<double>(n);
  // generalized binomial coefficient C(n + shape - 1, n)
  const double log_coef = log_gamma(k + shape) - log_gamma(shape) - log_gamma(k + 1.0);
  return log_coef + shape * std::log(rate / (1.0 + rate)) - k * std::log1p(rate);
}

double gamma_log_pdf(double shape, double rate, double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("gamma_log_pdf: x must be positive");
  }
  return shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double lomax_log_pdf(double shape, double scale, double x) {
  return std::log(shape) + shape * std::log(scale) - (shape + 1.0) * std::log(scale + x);
}

double nb_mixture_log_pmf(const FreqParams &params, std::uint64_t n) {
  validate(params);
  const double lo = safe_log(params.p) + nb_log_pmf(params.alpha1, params.beta, n);
  const double hi =
      safe_log(1.0 - params.p) + nb_log_pmf(params.alpha1 + params.alpha2, params.beta, n);
  return log_add_exp(lo, hi);
}

std::vector<double> nb_mixture_cdf_table(const FreqParams &params, std::uint64_t n_max) {
  validate(params);
  std::vector<double> table;
  table.reserve(n_max + 1);
  double acc = 0.0;
  for (std::uint64_t k = 0; k <= n_max; ++k) {
    acc += std::exp(nb_mixture_log_pmf(params, k));
    table.push_back(std::min(acc, 1.0));
  }
  return table;
}

double nb_mixture_cdf(const FreqParams &params, std::uint64_t n) {
  return nb_mixture_cdf_table(params, n).back();
}

double gamma_mixture_prior_log_pdf(const FreqParams &params, double lambda) {
  validate(params);
  if (!(lambda > 0.0)) {
    throw std::domain_error("gamma_mixture_prior_log_pdf: lambda must be positive");
  }
  const double lo = safe_log(params.p) + gamma_log_pdf(params.alpha1, params.beta, lambda);
  const double hi = safe_log(1.0 - params.p) +
                    gamma_log_pdf(params.alpha1 + params.alpha2, params.beta, lambda);
  return log_add_exp(lo, hi);
}

double severity_mixture_log_pdf(const SevParams &params, double y) {
  validate(params);
  if (!(y >= 0.0)) {
    throw std::domain_error("severity_mixture_log_pdf: y must be non-negative");
  }
  const double expo = safe_log(params.nu) + std::log(params.mu) - params.mu * y;
  const double pareto = safe_log(1.0 - params.nu) + lomax_log_pdf(params.delta, params.sigma, y);
  return log_add_exp(expo, pareto);
}

double interarrival_mixture_log_pdf(const FreqParams &params, double t) {
  validate(params);
  if (!(t >= 0.0)) {
    throw std::domain_error("interarrival_mixture_log_pdf: t must be non-negative");
  }
  const double lo = safe_log(params.p) + lomax_log_pdf(params.alpha1, params.beta, t);
  const double hi = safe_log(1.0 - params.p) +
                    lomax_log_pdf(params.alpha1 + params.alpha2, params.beta, t);
  return log_add_exp(lo, hi);
}

double count_mean(const FreqParams &params) {
  return (params.alpha1 + (1.0 - params.p) * params.alpha2) / params.beta;
}

double count_variance(const FreqParams &params) {
  // Var N = E[Lambda] + Var Lambda for a mixed Poisson count.
  const double m1 = params.alpha1 / params.beta;
  const double m2 = (params.alpha1 + params.alpha2) / params.beta;
  const double v1 = params.alpha1 / (params.beta * params.beta);
  const double v2 = (params.alpha1 + params.alpha2) / (params.beta * params.beta);
  const double mean = params.p * m1 + (1.0 - params.p) * m2;
  const double second = params.p * (v1 + m1 * m1) + (1.0 - params.p) * (v2 + m2 * m2);
  return mean + second - mean * mean;
}

double severity_mean(const SevParams &params) {
  validate(params);
  if (params.nu < 1.0 && params.delta <= 1.0) {
    throw std::domain_error("severity_mean: Pareto shape <= 1 has no finite mean");
  }
  const double pareto = params.nu < 1.0 ? params.sigma / (params.delta - 1.0) : 0.0;
  return params.nu / params.mu + (1.0 - params.nu) * pareto;
}

double draw_exponential(Rng &rng, double rate) { return -std::log(rng.uniform()) / rate; }

double draw_lomax(Rng &rng, double shape, double scale) {
  return scale * std::expm1(-std::log(rng.uniform()) / shape);
}

double draw_severity(Rng &rng, const SevParams &params) {
  if (rng.uniform() < params.nu) {
    return draw_exponential(rng, params.mu);
  }
  return draw_lomax(rng, params.delta, params.sigma);
}

double draw_intensity(Rng &rng, const FreqParams &params) {
  const bool historical_only = rng.uniform() < params.p;
  const double shape = historical_only ? params.alpha1 : params.alpha1 + params.alpha2;
  return rng.gamma(shape, params.beta);
}

std::vector<std::uint64_t> sample_counts(const FreqParams &params, std::size_t periods,
                                         RngSeed seed) {
  validate(params);
  if (periods == 0) {
    throw std::invalid_argument("sample_counts: periods must be at least 1");
  }
  Rng rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(periods);
  for (std::size_t i = 0; i < periods; ++i) {
    out.push_back(rng.poisson(draw_intensity(rng, params)));
  }
  return out;
}

std::vector<double> sample_severities(const SevParams &params, std::size_t count, RngSeed seed) {
  validate(params);
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double y = draw_severity(rng, params);
    // a zero draw would break the positivity contract of a severity sample
    while (!(y > 0.0)) y = draw_severity(rng, params);
    out.push_back(y);
  }
  return out;
}

}  // namespace twostream
