#include "twostream/gof.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twostream/special_math.hpp"

namespace twostream {

namespace {

// Grows a CDF table until it covers n.
class CdfTable {
 public:
  explicit CdfTable(const FreqParams &params) : params_(params) {}

  double at(std::uint64_t n) {
    while (table_.size() <= n) {
      acc_ += std::exp(nb_mixture_log_pmf(params_, table_.size()));
      table_.push_back(std::min(acc_, 1.0));
    }
    return table_[n];
  }

  /// Smallest n with F(n) >= level.
  std::uint64_t quantile(double level) {
    std::uint64_t n = 0;
    while (at(n) < level) ++n;
    return n;
  }

 private:
  FreqParams params_;
  std::vector<double> table_;
  double acc_ = 0.0;
};

}  // namespace

KsResult ks_test(const FreqParams &params, const CountSample &sample) {
  validate(params);
  if (sample.m() < 10) {
    throw std::invalid_argument("ks_test needs at least 10 observations");
  }
  std::vector<std::uint64_t> sorted = sample.counts();
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  CdfTable cdf(params);
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const std::uint64_t x = sorted[i];
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == x) ++j;
    const double below = static_cast<double>(i) / m;  // empirical P[N < x]
    const double at = static_cast<double>(j) / m;     // empirical P[N <= x]
    const double model_at = cdf.at(x);
    const double model_below = x == 0 ? 0.0 : cdf.at(x - 1);
    d = std::max({d, std::abs(at - model_at), std::abs(below - model_below)});
    i = j;
  }
  return {d, kolmogorov_sf(std::sqrt(m) * d)};
}

double pearson_statistic(std::span<const GofBin> bins) {
  double stat = 0.0;
  for (const auto &b : bins) {
    const double diff = b.observed - b.expected;
    stat += diff * diff / b.expected;
  }
  return stat;
}

double chisq_pvalue(double statistic, int df) {
  if (df < 1) {
    throw GofError("chi-square test needs at least one degree of freedom");
  }
  return reg_incomplete_gamma_upper(0.5 * df, 0.5 * std::max(statistic, 0.0));
}

ChisqResult chisq_test(const FreqParams &params, const CountSample &sample,
                       int fitted_param_count) {
  validate(params);
  if (sample.m() < 30) {
    throw std::invalid_argument("chisq_test needs at least 30 observations");
  }
  if (fitted_param_count < 0) {
    throw std::invalid_argument("fitted_param_count must be non-negative");
  }
  const double m = static_cast<double>(sample.m());
  const auto k = static_cast<std::size_t>(
      std::max(3.0, std::min(std::floor(m / 5.0), std::ceil(2.0 * std::pow(m, 0.4)))));

  CdfTable cdf(params);
  std::vector<GofBin> raw;
  std::uint64_t lo = 0;
  for (std::size_t j = 1; j < k; ++j) {
    const std::uint64_t cut = cdf.quantile(static_cast<double>(j) / static_cast<double>(k));
    if (!raw.empty() && cut < lo) continue;  // empty after discreteness collapse
    raw.push_back({lo, cut, 0.0, 0.0});
    lo = cut + 1;
  }
  raw.push_back({lo, GofBin::kOpenBin, 0.0, 0.0});
  for (auto &b : raw) {
    const double upper = b.hi == GofBin::kOpenBin ? 1.0 : cdf.at(b.hi);
    const double lower = b.lo == 0 ? 0.0 : cdf.at(b.lo - 1);
    b.expected = m * std::max(upper - lower, 0.0);
  }
  for (auto n : sample.counts()) {
    auto it = std::find_if(raw.begin(), raw.end(), [&](const GofBin &b) { return n <= b.hi; });
    it->observed += 1.0;
  }

  std::vector<GofBin> merged;
  for (const auto &b : raw) {
    if (!merged.empty() && merged.back().expected < 5.0) {
      merged.back().hi = b.hi;
      merged.back().observed += b.observed;
      merged.back().expected += b.expected;
    } else {
      merged.push_back(b);
    }
  }
  if (merged.size() >= 2 && merged.back().expected < 5.0) {
    const GofBin tail = merged.back();
    merged.pop_back();
    merged.back().hi = tail.hi;
    merged.back().observed += tail.observed;
    merged.back().expected += tail.expected;
  }
  if (merged.size() < 3) {
    throw GofError("only " + std::to_string(merged.size()) +
                   " bins remain after merging; too few for a chi-square test");
  }
  ChisqResult result;
  result.df = static_cast<int>(merged.size()) - 1 - fitted_param_count;
  if (result.df < 1) {
    throw GofError("chi-square test has " + std::to_string(merged.size()) + " bins and " +
                   std::to_string(fitted_param_count) +
                   " fitted parameters, leaving no degrees of freedom");
  }
  result.statistic = pearson_statistic(merged);
  result.pvalue = chisq_pvalue(result.statistic, result.df);
  result.bins = std::move(merged);
  return result;
}

GofReport goodness_of_fit(const FreqParams &params, const CountSample &sample,
                          int fitted_param_count) {
  const KsResult ks = ks_test(params, sample);
  ChisqResult chi = chisq_test(params, sample, fitted_param_count);
  return {ks.statistic, ks.pvalue, chi.statistic, chi.df, chi.pvalue, std::move(chi.bins)};
}

}  // namespace twostream
