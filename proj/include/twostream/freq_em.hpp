#ifndef TWOSTREAM_FREQ_EM_HPP_
#define TWOSTREAM_FREQ_EM_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/em.hpp"

namespace twostream {

// Claim counts, one per period.
class CountSample {
 public:
  /// Throws std::invalid_argument for fewer than two observations.
  explicit CountSample(std::vector<std::uint64_t> counts);

  const std::vector<std::uint64_t> &counts() const { return counts_; }
  std::size_t m() const { return counts_.size(); }
  double total() const { return total_; }
  bool has_two_distinct_values() const;

 private:
  std::vector<std::uint64_t> counts_;
  double total_ = 0.0;
};

// Raised by moment_init_freq when the sample variance does not exceed the
// mean, i.e. no mixed-Poisson model can explain the data.
class UnderdispersionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Posterior probability that each count came from the alpha1 component.
std::vector<double> e_step_freq(const FreqParams &params, const CountSample &sample);

/// Expected complete-data log-likelihood Q(params | tau).
double q_value_freq(const FreqParams &params, const CountSample &sample,
                    std::span<const double> tau);

/// Partial derivatives of Q with respect to (alpha1, alpha2, beta).
std::array<double, 3> q_gradient_freq(const FreqParams &params, const CountSample &sample,
                                      std::span<const double> tau);

// Maximizes Q for fixed tau. p has a closed form; beta is profiled out in
// closed form from dQ/dbeta = 0, and the remaining two shape equations are
// solved by damped Newton in log coordinates starting from `params`. If the
// Newton root does not raise Q over the current point (possible far from
// the optimum), the step is backtracked towards the current shapes, so Q
// never decreases. Solver failures propagate as SolverError.
FreqParams m_step_freq(const FreqParams &params, const CountSample &sample,
                       std::span<const double> tau, const SolveOptions &opts = {});

double observed_loglik_freq(const FreqParams &params, const CountSample &sample);

EmFit<FreqParams> fit_freq(const CountSample &sample, const FreqParams &init,
                           const EmOptions &opts = {});

// Deterministic starting point. The sample is split between its two
// dominant histogram modes (or at the median when there is only one), a
// Negative Binomial is moment-matched to each part with a shared rate, and
// p is the share of the lower part. Requires m >= 4 and overdispersion.
FreqParams moment_init_freq(const CountSample &sample);

}  // namespace twostream

#endif  // TWOSTREAM_FREQ_EM_HPP_
