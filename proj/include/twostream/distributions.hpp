#ifndef TWOSTREAM_DISTRIBUTIONS_HPP_
#define TWOSTREAM_DISTRIBUTIONS_HPP_

#include <cstdint>
#include <vector>

#include "twostream/rng.hpp"

namespace twostream {

// Claim-frequency parameters. The historical intensity is Gamma(alpha1, beta);
// the unforeseeable intensity is zero with probability p and Gamma(alpha2, beta)
// otherwise, so the total intensity is a two-component Gamma mixture with
// shapes alpha1 and alpha1 + alpha2 sharing the rate beta.
struct FreqParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double beta = 1.0;
  double p = 0.5;

  bool operator==(const FreqParams &) const = default;
};

// Claim-severity parameters: exponential(mu) for the historical stream,
// Lomax-form Pareto with density delta sigma^delta / (sigma + y)^(delta + 1)
// for the unforeseeable stream, mixed with weight nu on the exponential.
struct SevParams {
  double mu = 1.0;
  double delta = 2.0;
  double sigma = 1.0;
  double nu = 0.5;

  bool operator==(const SevParams &) const = default;
};

// Fraction of the total intensity owed to the historical stream, in (0, 1].
// Equal to 1 with probability p; Beta(alpha1, alpha2) otherwise.
struct SplitRate {
  double xi = 1.0;
};

/// Throws std::invalid_argument unless every field is inside its domain.
void validate(const FreqParams &params);
void validate(const SevParams &params);
void validate(const SplitRate &split);

/// Negative Binomial log-pmf for a Poisson whose rate is Gamma(shape, rate).
double nb_log_pmf(double shape, double rate, std::uint64_t n);

/// Gamma(shape, rate) log-density.
double gamma_log_pdf(double shape, double rate, double x);

/// Lomax log-density shape * scale^shape / (scale + x)^(shape + 1).
double lomax_log_pdf(double shape, double scale, double x);

double nb_mixture_log_pmf(const FreqParams &params, std::uint64_t n);
double nb_mixture_cdf(const FreqParams &params, std::uint64_t n);
/// CDF at 0..n_max in one pass; entry k is P[N <= k].
std::vector<double> nb_mixture_cdf_table(const FreqParams &params, std::uint64_t n_max);

double gamma_mixture_prior_log_pdf(const FreqParams &params, double lambda);
double severity_mixture_log_pdf(const SevParams &params, double y);
double interarrival_mixture_log_pdf(const FreqParams &params, double t);

double count_mean(const FreqParams &params);
double count_variance(const FreqParams &params);

/// Mean claim size nu / mu + (1 - nu) sigma / (delta - 1). Throws
/// std::domain_error when delta <= 1 and the Pareto mean is infinite.
double severity_mean(const SevParams &params);

std::vector<std::uint64_t> sample_counts(const FreqParams &params, std::size_t periods,
                                         RngSeed seed);
std::vector<double> sample_severities(const SevParams &params, std::size_t count, RngSeed seed);

/// Inverse-CDF draws, shared by the scenario and surplus simulators.
double draw_exponential(Rng &rng, double rate);
double draw_lomax(Rng &rng, double shape, double scale);
double draw_severity(Rng &rng, const SevParams &params);
/// Latent intensity from the two-component Gamma mixture prior.
double draw_intensity(Rng &rng, const FreqParams &params);

}  // namespace twostream

#endif  // TWOSTREAM_DISTRIBUTIONS_HPP_
