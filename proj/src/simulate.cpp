#include "twostream/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twostream {

void validate(const ScenarioSpec &spec) {
  if (spec.pattern.empty()) throw std::invalid_argument("scenario pattern is empty");
  if (spec.periods == 0) throw std::invalid_argument("scenario needs at least one period");
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw std::invalid_argument("noise_sd must be finite and non-negative");
  }
}

std::vector<PeriodRecord> generate_scenario(const FreqParams &freq, const SevParams &sev,
                                            const ScenarioSpec &spec) {
  validate(freq);
  validate(sev);
  validate(spec);
  Rng rng(spec.seed);
  const double prior_mean = premium_sev(sev, 0, 0.0).value;
  std::vector<PeriodRecord> out;
  out.reserve(spec.periods);
  for (std::size_t k = 0; k < spec.periods; ++k) {
    PeriodRecord rec;
    rec.count = spec.pattern[k % spec.pattern.size()];
    std::vector<double> ys;
    ys.reserve(rec.count);
    for (std::uint64_t j = 0; j < rec.count; ++j) {
      if (spec.severity_mode == SeverityMode::model_draw) {
        ys.push_back(draw_severity(rng, sev));
      } else {
        const double noise = spec.noise_sd > 0.0 ? spec.noise_sd * rng.normal() : 0.0;
        ys.push_back(std::max(prior_mean + noise, kSeverityFloor));
      }
    }
    rec.severities = std::move(ys);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PremiumQuote> premium_evolution(const FreqParams &freq, const SevParams &sev,
                                            const std::vector<PeriodRecord> &records) {
  ClaimHistory hist;
  std::vector<PremiumQuote> quotes;
  quotes.reserve(records.size() + 1);
  quotes.push_back(premium_combined(freq, sev, hist));
  for (const auto &r : records) {
    hist.add(r);
    quotes.push_back(premium_combined(freq, sev, hist));
  }
  return quotes;
}

void validate(const SurplusConfig &cfg) {
  if (!(cfg.initial_surplus >= 0.0) || !std::isfinite(cfg.initial_surplus)) {
    throw std::invalid_argument("initial surplus must be finite and non-negative");
  }
  if (!(cfg.loading >= 0.0) || !std::isfinite(cfg.loading)) {
    throw std::invalid_argument("loading must be finite and non-negative");
  }
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (!(cfg.dt > 0.0) || cfg.dt > cfg.horizon / 100.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt must be positive and at most horizon / 100");
  }
}

SurplusPath simulate_surplus(const FreqParams &freq, const SevParams &sev,
                             const SurplusConfig &cfg, RngSeed seed) {
  validate(freq);
  validate(sev);
  validate(cfg);
  Rng rng(seed);
  SurplusPath path;
  path.lambda = draw_intensity(rng, freq);
  path.premium_rate = (1.0 + cfg.loading) * severity_mean(sev);

  if (path.lambda > 0.0) {
    double t = draw_exponential(rng, path.lambda);
    while (t <= cfg.horizon) {
      path.claim_times.push_back(t);
      path.claim_sizes.push_back(draw_severity(rng, sev));
      t += draw_exponential(rng, path.lambda);
    }
  }

  auto lambda_hat = [&](double s, std::uint64_t n) {
    return premium_freq(freq, s, static_cast<double>(n)).value;
  };

  double u = cfg.initial_surplus;
  double income = 0.0;
  double claims = 0.0;
  std::uint64_t n = 0;
  std::size_t next_claim = 0;
  double t_prev = 0.0;
  double rate_prev = lambda_hat(0.0, 0);
  path.times.push_back(0.0);
  path.surplus.push_back(u);

  auto accrue = [&](double t) {
    const double rate = lambda_hat(t, n);
    const double piece = path.premium_rate * 0.5 * (rate_prev + rate) * (t - t_prev);
    income += piece;
    u += piece;
    t_prev = t;
    rate_prev = rate;
  };
  auto record = [&](double t) {
    path.times.push_back(t);
    path.surplus.push_back(u);
    if (u < 0.0 && !path.ruined) {
      path.ruined = true;
      path.ruin_time = t;
    }
  };

  const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double grid_t = std::min(cfg.horizon, static_cast<double>(k) * cfg.dt);
    while (next_claim < path.claim_times.size() && path.claim_times[next_claim] <= grid_t) {
      const double tc = path.claim_times[next_claim];
      if (tc > t_prev) accrue(tc);
      u -= path.claim_sizes[next_claim];
      claims += path.claim_sizes[next_claim];
      ++n;
      rate_prev = lambda_hat(tc, n);  // refreshed at the claim instant
      ++next_claim;
      if (tc < grid_t) record(tc);
    }
    accrue(grid_t);
    record(grid_t);
  }
  path.premium_income = income;
  path.total_claims = claims;
  return path;
}

std::vector<InterarrivalClaim> sample_interarrival_pairs(const FullParams &params,
                                                         std::size_t count, RngSeed seed) {
  validate(params);
  Rng rng(seed);
  const FreqParams &f = params.freq;
  const SevParams &s = params.sev;
  std::vector<InterarrivalClaim> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double lambda = 0.0;
    double xi = 1.0;
    if (rng.bernoulli(f.p)) {
      lambda = rng.gamma(f.alpha1, f.beta);
    } else {
      lambda = rng.gamma(f.alpha1 + f.alpha2, f.beta);
      xi = rng.beta(f.alpha1, f.alpha2);
    }
    InterarrivalClaim c;
    c.t = draw_exponential(rng, lambda);
    c.y = rng.bernoulli(xi) ? draw_exponential(rng, s.mu) : draw_lomax(rng, s.delta, s.sigma);
    out.push_back(c);
  }
  return out;
}

}  // namespace twostream
