#ifndef TWOSTREAM_LIKELIHOOD_HPP_
#define TWOSTREAM_LIKELIHOOD_HPP_

#include <span>
#include <utility>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/premium.hpp"

namespace twostream {

struct FullParams {
  FreqParams freq;
  SevParams sev;

  /// Severity nu derived from the frequency parameters.
  static FullParams linked(const FreqParams &freq, SevParams sev);

  bool operator==(const FullParams &) const = default;
};

/// Throws std::invalid_argument on invalid components, or, when `linked`,
/// if sev.nu differs from nu_from_freq(freq) by more than 1e-12.
void validate(const FullParams &params, bool linked = false);

// Sum of count log-pmfs plus the log-density of every recorded claim size.
// Every period must carry exactly `count` severities (a zero-count period
// may omit the list). Throws std::invalid_argument otherwise.
double global_loglik(const FullParams &params, std::span<const PeriodRecord> data);

struct InterarrivalClaim {
  double t = 0.0;  // waiting time before the claim
  double y = 0.0;  // claim size
};

constexpr int kDefaultSplitNodes = 64;

// Joint log-density of one (interarrival time, claim size) pair. With
// probability p the split rate is 1: the claim is exponential and the
// waiting time is the alpha1-Pareto. Otherwise the split rate xi is
// Beta(alpha1, alpha2), the claim is xi f + (1 - xi) g, and the waiting time
// is the (alpha1 + alpha2)-Pareto, the marginal of an exponential with
// Gamma(alpha1 + alpha2, beta) rate. The xi-integral uses Gauss-Legendre
// with `quad_nodes` nodes on each half of (0, 1), with a power substitution
// at an endpoint whose Beta shape is below 1.
double joint_ty_log_density(const FullParams &params, double t, double y,
                            int quad_nodes = kDefaultSplitNodes);

/// Sum over pairs of joint_ty_log_density; each pair integrates its own split rate.
double joint_sample_loglik(const FullParams &params, std::span<const InterarrivalClaim> pairs,
                           int quad_nodes = kDefaultSplitNodes);

}  // namespace twostream

#endif  // TWOSTREAM_LIKELIHOOD_HPP_
