#ifndef TWOSTREAM_SEV_EM_HPP_
#define TWOSTREAM_SEV_EM_HPP_

#include <array>
#include <span>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/em.hpp"

namespace twostream {

// Individual claim sizes pooled over all periods.
class SeveritySample {
 public:
  /// Throws std::invalid_argument on non-positive values or fewer than two.
  explicit SeveritySample(std::vector<double> values);

  const std::vector<double> &values() const { return values_; }
  std::size_t m_star() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// Severity mixture weight implied by the frequency model:
/// p + (1 - p) B(alpha1 + 1, alpha2) / B(alpha1, alpha2) = p + (1 - p) alpha1 / (alpha1 + alpha2).
double nu_from_freq(const FreqParams &freq);

/// Posterior probability that each claim came from the exponential component.
std::vector<double> e_step_sev(const SevParams &params, const SeveritySample &sample);

/// Expected complete-data log-likelihood Q(params | tau).
double q_value_sev(const SevParams &params, const SeveritySample &sample,
                   std::span<const double> tau);

/// Partial derivatives of Q with respect to (mu, delta, sigma).
std::array<double, 3> q_gradient_sev(const SevParams &params, const SeveritySample &sample,
                                     std::span<const double> tau);

// mu and (optionally) nu are closed form. delta is profiled out of
// dQ/ddelta = 0 for each sigma, and dQ/dsigma = 0 is solved by Newton in
// log sigma. Same no-decrease guard as the frequency M-step. Throws
// std::domain_error when sum tau_i y_i == 0.
SevParams m_step_sev(const SevParams &params, const SeveritySample &sample,
                     std::span<const double> tau, bool estimate_nu,
                     const SolveOptions &opts = {});

double observed_loglik_sev(const SevParams &params, const SeveritySample &sample);

EmFit<SevParams> fit_sev(const SeveritySample &sample, const SevParams &init, bool estimate_nu,
                         const EmOptions &opts = {});

/// Heuristic starting point when none is supplied: mu = 1 / mean,
/// delta = 3, sigma = 2 * mean (a Lomax with the sample mean). nu is left
/// at `nu`.
SevParams default_init_sev(const SeveritySample &sample, double nu);

}  // namespace twostream

#endif  // TWOSTREAM_SEV_EM_HPP_
