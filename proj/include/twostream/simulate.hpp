#ifndef TWOSTREAM_SIMULATE_HPP_
#define TWOSTREAM_SIMULATE_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/likelihood.hpp"
#include "twostream/premium.hpp"
#include "twostream/rng.hpp"

namespace twostream {

enum class SeverityMode { model_draw, prior_mean_plus_noise };

struct ScenarioSpec {
  std::vector<std::uint64_t> pattern;  // per-period counts, cycled
  std::size_t periods = 0;
  SeverityMode severity_mode = SeverityMode::model_draw;
  double noise_sd = 0.0;  // prior_mean_plus_noise only
  RngSeed seed{};
};

/// Throws std::invalid_argument on an empty pattern, zero periods or negative noise.
void validate(const ScenarioSpec &spec);

/// Floor applied to noisy severities so every claim stays positive.
constexpr double kSeverityFloor = 1e-6;

// Counts follow the cycled pattern. Severities are drawn from the mixture,
// or set to the prior severity premium plus Normal(0, noise_sd) noise
// truncated at kSeverityFloor.
std::vector<PeriodRecord> generate_scenario(const FreqParams &freq, const SevParams &sev,
                                            const ScenarioSpec &spec);

/// Quote k uses the statistics of periods 1..k; quote 0 is the prior. periods + 1 entries.
std::vector<PremiumQuote> premium_evolution(const FreqParams &freq, const SevParams &sev,
                                            const std::vector<PeriodRecord> &records);

struct SurplusConfig {
  double initial_surplus = 0.0;
  double loading = 0.0;
  double horizon = 1.0;
  double dt = 0.01;
};

/// Throws std::invalid_argument unless u >= 0, loading >= 0, horizon > 0 and 0 < dt <= horizon / 100.
void validate(const SurplusConfig &cfg);

struct SurplusPath {
  std::vector<double> times;
  std::vector<double> surplus;
  std::vector<double> claim_times;
  std::vector<double> claim_sizes;
  bool ruined = false;
  std::optional<double> ruin_time;
  double lambda = 0.0;          // latent intensity of this path
  double premium_rate = 0.0;    // c = (1 + loading) E[Y]
  double premium_income = 0.0;  // c * integral of the posterior-mean intensity
  double total_claims = 0.0;
};

// U(t) = u + c * int_0^t lambda_hat(s) ds - S(t), with lambda_hat(s) the
// posterior mean intensity after exposure s and N(s) claims. The integral
// is a trapezoid rule on a dt grid merged with the claim instants, so
// lambda_hat is smooth on every panel. The surplus is recorded at each grid
// point and just after every claim.
SurplusPath simulate_surplus(const FreqParams &freq, const SevParams &sev,
                             const SurplusConfig &cfg, RngSeed seed);

/// Draws (waiting time, claim size) pairs from the joint model, one split rate per pair.
std::vector<InterarrivalClaim> sample_interarrival_pairs(const FullParams &params,
                                                         std::size_t count, RngSeed seed);

}  // namespace twostream

#endif  // TWOSTREAM_SIMULATE_HPP_
