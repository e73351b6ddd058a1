#ifndef TWOSTREAM_PREMIUM_HPP_
#define TWOSTREAM_PREMIUM_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "twostream/distributions.hpp"

namespace twostream {

// One rating period: its claim count and, when recorded, the claim sizes.
struct PeriodRecord {
  std::uint64_t count = 0;
  std::optional<std::vector<double>> severities;

  bool operator==(const PeriodRecord &) const = default;
};

// Claim records plus the running sufficient statistics (m, sum n, m*, sum y)
// the posteriors depend on.
class ClaimHistory {
 public:
  ClaimHistory() = default;
  explicit ClaimHistory(const std::vector<PeriodRecord> &periods);

  /// Throws std::invalid_argument on a non-positive or non-finite severity.
  void add(PeriodRecord record);

  const std::vector<PeriodRecord> &periods() const { return periods_; }
  std::uint64_t m() const { return periods_.size(); }
  std::uint64_t sum_n() const { return sum_n_; }
  std::uint64_t m_star() const { return m_star_; }
  double sum_y() const { return sum_y_; }

  /// True when every period recorded its severities.
  bool severities_recorded() const { return missing_severities_ == 0; }
  /// True when every recorded severity list has exactly `count` entries.
  bool consistent() const { return mismatched_ == 0; }

 private:
  std::vector<PeriodRecord> periods_;
  std::uint64_t sum_n_ = 0;
  std::uint64_t m_star_ = 0;
  double sum_y_ = 0.0;
  std::size_t missing_severities_ = 0;
  std::size_t mismatched_ = 0;
};

// Posterior of the claim intensity: w * Gamma(shape_lo, rate) + (1 - w) * Gamma(shape_hi, rate).
struct PosteriorFreq {
  double w = 1.0;
  double shape_lo = 1.0;
  double shape_hi = 1.0;
  double rate = 1.0;
};

// Posterior of the exponential severity rate: an atom of mass omega at mu
// plus (1 - omega) * Gamma(gamma_shape, gamma_rate).
struct PosteriorSev {
  double omega = 1.0;
  double gamma_shape = 1.0;
  double gamma_rate = 1.0;
  double atom = 1.0;
};

struct WeightedPremium {
  double value = 0.0;
  double weight = 1.0;  // w for frequency, omega for severity
};

struct PremiumQuote {
  double freq_component = 0.0;
  double sev_component = 0.0;
  double premium = 0.0;
  double w = 1.0;
  double omega = 1.0;
  /// Severity component is the no-data value because claim sizes were not recorded.
  bool frequency_only = false;
};

// Frequency side. `exposure` is the number of observed periods m; it may be
// fractional, which the continuous-time surplus simulator relies on.
//
// ln G = ln((1 - p) / p) + ln B(alpha1, alpha2) - ln B(sum_n + alpha1, alpha2)
//        + alpha2 (ln beta - ln(beta + m)).
// Returns -inf when p == 1; throws std::domain_error when p == 0.
double log_G(const FreqParams &freq, double exposure, double sum_n);
PosteriorFreq posterior_freq(const FreqParams &freq, double exposure, double sum_n);
/// Posterior mean of the intensity: w (sum_n + a1) / (beta + m) + (1 - w) (sum_n + a1 + a2) / (beta + m).
WeightedPremium premium_freq(const FreqParams &freq, double exposure, double sum_n);

// Severity side.
//
// ln phi = ln((1 - nu) / nu) + ln Gamma(m* + delta) - ln Gamma(delta) + delta ln sigma
//          - (m* + delta) ln(sigma + sum_y) - m* ln mu + mu sum_y.
// Computed entirely in logs; exp(mu * sum_y) alone overflows for long
// histories. Returns -inf when nu == 1; throws std::domain_error when nu == 0.
double log_phi(const SevParams &sev, std::uint64_t m_star, double sum_y);
PosteriorSev posterior_sev(const SevParams &sev, std::uint64_t m_star, double sum_y);
/// omega / mu + (1 - omega) (m* + delta) / (sum_y + sigma).
WeightedPremium premium_sev(const SevParams &sev, std::uint64_t m_star, double sum_y);

/// Product of the frequency and severity premiums at the history's statistics.
PremiumQuote premium_combined(const FreqParams &freq, const SevParams &sev,
                              const ClaimHistory &hist);

// Independent oracles: posterior means by direct numerical integration of
// likelihood times prior, with no use of the closed-form weights.
double posterior_mean_quadrature_freq(const FreqParams &freq, double exposure, double sum_n);
double posterior_mean_quadrature_sev(const SevParams &sev, std::uint64_t m_star, double sum_y);

}  // namespace twostream

#endif  // TWOSTREAM_PREMIUM_HPP_
