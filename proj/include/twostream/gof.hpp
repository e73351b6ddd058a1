#ifndef TWOSTREAM_GOF_HPP_
#define TWOSTREAM_GOF_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/freq_em.hpp"

namespace twostream {

class GofError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Count range [lo, hi]; hi == kOpenBin means "and above".
struct GofBin {
  static constexpr std::uint64_t kOpenBin = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  double observed = 0.0;
  double expected = 0.0;
};

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

struct ChisqResult {
  double statistic = 0.0;
  int df = 0;
  double pvalue = 1.0;
  std::vector<GofBin> bins;
};

struct GofReport {
  double ks_statistic = 0.0;
  double ks_pvalue = 1.0;
  double chisq_statistic = 0.0;
  int chisq_df = 0;
  double chisq_pvalue = 1.0;
  std::vector<GofBin> bins;
};

// Kolmogorov-Smirnov distance between the empirical CDF and the model CDF,
// checked on both sides of every observed value, with the asymptotic
// Kolmogorov p-value. On discrete data that p-value is conservative.
// Requires m >= 10.
KsResult ks_test(const FreqParams &params, const CountSample &sample);

// Pearson chi-square on equiprobable model-quantile bins (about 2 m^0.4 of
// them), merged left to right until each expects at least 5 counts. df is
// bins - 1 - fitted_param_count. Requires m >= 30; throws GofError when
// fewer than 3 bins survive merging or df < 1.
ChisqResult chisq_test(const FreqParams &params, const CountSample &sample,
                       int fitted_param_count);

/// Sum of (observed - expected)^2 / expected.
double pearson_statistic(std::span<const GofBin> bins);
/// Upper tail of chi-square with df degrees of freedom.
double chisq_pvalue(double statistic, int df);

GofReport goodness_of_fit(const FreqParams &params, const CountSample &sample,
                          int fitted_param_count);

}  // namespace twostream

#endif  // TWOSTREAM_GOF_HPP_
