#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/premium.hpp"
#include "twostream/sev_em.hpp"
#include "twostream/simulate.hpp"

using namespace twostream;

namespace {

const FreqParams kFreq{3.0, 1.0, 0.5, 0.6};
const SevParams kSev{1.0, 2.0, 0.5, 0.9};

ScenarioSpec spec_021(SeverityMode mode, double sd, std::uint64_t seed) {
  ScenarioSpec s;
  s.pattern = {0, 2, 1};
  s.periods = 12;
  s.severity_mode = mode;
  s.noise_sd = sd;
  s.seed = RngSeed{seed};
  return s;
}

void check_path_invariants(const SurplusPath &path, const SurplusConfig &cfg) {
  REQUIRE(path.times.size() == path.surplus.size());
  CHECK(path.times.front() == 0.0);
  CHECK(path.surplus.front() == cfg.initial_surplus);
  CHECK(path.times.back() == doctest::Approx(cfg.horizon).epsilon(1e-12));
  for (std::size_t k = 1; k < path.times.size(); ++k) CHECK(path.times[k] >= path.times[k - 1]);
  const double lowest = *std::min_element(path.surplus.begin(), path.surplus.end());
  CHECK(path.ruined == (lowest < 0.0));
  CHECK(path.ruin_time.has_value() == path.ruined);
  CHECK(path.claim_times.size() == path.claim_sizes.size());
}

}  // namespace

TEST_CASE("scenario spec validation") {
  ScenarioSpec s = spec_021(SeverityMode::model_draw, 0.0, 1);
  CHECK_NOTHROW(validate(s));
  s.pattern.clear();
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = spec_021(SeverityMode::model_draw, 0.0, 1);
  s.periods = 0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = spec_021(SeverityMode::prior_mean_plus_noise, -0.1, 1);
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("scenario counts follow the pattern") {
  const auto recs = generate_scenario(kFreq, kSev, spec_021(SeverityMode::model_draw, 0.0, 4));
  REQUIRE(recs.size() == 12);
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(recs[k].count == std::vector<std::uint64_t>{0, 2, 1}[k % 3]);
    REQUIRE(recs[k].severities.has_value());
    CHECK(recs[k].severities->size() == recs[k].count);
    for (double y : *recs[k].severities) CHECK(y > 0.0);
    total += recs[k].count;
  }
  CHECK(total == 12);
}

TEST_CASE("noise-free severities are the prior mean") {
  const SevParams sev{1.0, 2.0, 0.5, nu_from_freq(kFreq)};
  const auto recs = generate_scenario(kFreq, sev, spec_021(SeverityMode::prior_mean_plus_noise, 0.0, 4));
  for (const auto &r : recs) {
    for (double y : *r.severities) CHECK(y == doctest::Approx(1.3).epsilon(1e-14));
  }
}

TEST_CASE("noisy severities stay above the floor") {
  const auto recs =
      generate_scenario(kFreq, kSev, spec_021(SeverityMode::prior_mean_plus_noise, 5.0, 11));
  int floored = 0;
  for (const auto &r : recs) {
    for (double y : *r.severities) {
      CHECK(y >= kSeverityFloor);
      floored += y == kSeverityFloor;
    }
  }
  CHECK(floored > 0);  // sd 5 around 1.3 pushes several draws below zero
}

TEST_CASE("scenarios are reproducible") {
  const auto spec = spec_021(SeverityMode::model_draw, 0.0, 99);
  CHECK(generate_scenario(kFreq, kSev, spec) == generate_scenario(kFreq, kSev, spec));
  const auto other = spec_021(SeverityMode::model_draw, 0.0, 100);
  CHECK(generate_scenario(kFreq, kSev, spec) != generate_scenario(kFreq, kSev, other));
}

TEST_CASE("premium evolution") {
  const SevParams sev{1.0, 2.0, 0.5, nu_from_freq(kFreq)};
  const auto recs = generate_scenario(kFreq, sev, spec_021(SeverityMode::prior_mean_plus_noise, 0.1, 7));
  const auto quotes = premium_evolution(kFreq, sev, recs);
  REQUIRE(quotes.size() == recs.size() + 1);
  CHECK(std::abs(quotes[0].premium - 8.84) <= 1e-12);
  ClaimHistory h;
  for (std::size_t k = 1; k < quotes.size(); ++k) {
    h.add(recs[k - 1]);
    CHECK(quotes[k].premium == premium_combined(kFreq, sev, h).premium);
    if (recs[k - 1].count == 0) CHECK(quotes[k].freq_component < quotes[k - 1].freq_component);
  }
  CHECK(premium_evolution(kFreq, sev, recs)[12].premium == quotes[12].premium);
  CHECK(premium_evolution(kFreq, sev, {}).size() == 1);
}

TEST_CASE("premium evolution depends only on running statistics") {
  // same per-period counts and totals, different split of the sizes
  std::vector<PeriodRecord> a{{2, std::vector<double>{1.0, 3.0}}, {1, std::vector<double>{0.5}}};
  std::vector<PeriodRecord> b{{2, std::vector<double>{2.5, 1.5}}, {1, std::vector<double>{0.5}}};
  const auto qa = premium_evolution(kFreq, kSev, a);
  const auto qb = premium_evolution(kFreq, kSev, b);
  for (std::size_t k = 0; k < qa.size(); ++k) {
    CHECK(qa[k].premium == doctest::Approx(qb[k].premium).epsilon(1e-15));
  }
}

TEST_CASE("surplus config validation") {
  CHECK_NOTHROW(validate(SurplusConfig{10, 0.2, 10, 0.1}));
  CHECK_THROWS_AS(validate(SurplusConfig{10, 0.2, 10, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SurplusConfig{-1, 0.2, 10, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SurplusConfig{10, -0.2, 10, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SurplusConfig{10, 0.2, 0, 0.0}), std::invalid_argument);
}

TEST_CASE("a path without claims never loses money") {
  // prior intensity around 1e-4 per unit time: almost every path is claim free
  const FreqParams quiet{0.5, 0.5, 5000.0, 0.99};
  const SurplusConfig cfg{1.0, 0.2, 10.0, 0.05};
  bool seen = false;
  for (std::uint64_t seed = 1; seed <= 20 && !seen; ++seed) {
    const auto path = simulate_surplus(quiet, kSev, cfg, RngSeed{seed});
    if (!path.claim_times.empty()) continue;
    seen = true;
    check_path_invariants(path, cfg);
    for (std::size_t k = 1; k < path.surplus.size(); ++k) CHECK(path.surplus[k] >= path.surplus[k - 1]);
    CHECK_FALSE(path.ruined);
    CHECK(path.total_claims == 0.0);
  }
  CHECK(seen);
}

TEST_CASE("cash is conserved on every path") {
  const SurplusConfig cfg{5.0, 0.1, 10.0, 0.1};
  int ruined = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto path = simulate_surplus(kFreq, kSev, cfg, RngSeed{seed});
    check_path_invariants(path, cfg);
    double claims = 0.0;
    for (double y : path.claim_sizes) claims += y;
    CHECK(claims == doctest::Approx(path.total_claims).epsilon(1e-14));
    const double expect = cfg.initial_surplus + path.premium_income - path.total_claims;
    CHECK(std::abs(path.surplus.back() - expect) <= 1e-8 * std::max(1.0, std::abs(expect)));
    CHECK(path.premium_rate == doctest::Approx(1.1 * severity_mean(kSev)).epsilon(1e-15));
    for (double t : path.claim_times) {
      CHECK(t >= 0.0);
      CHECK(t <= cfg.horizon);
    }
    ruined += path.ruined;
  }
  CHECK(ruined > 0);  // u = 5 against about 8.8 of expected claim cost per unit time
}

TEST_CASE("a large initial surplus is never ruined") {
  // prior mean aggregate claims over the horizon: E[Lambda] E[Y] * 10 = 88.4
  const SurplusConfig cfg{100.0 * 88.4, 0.0, 10.0, 0.1};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    CHECK_FALSE(simulate_surplus(kFreq, kSev, cfg, RngSeed{seed}).ruined);
  }
}

TEST_CASE("paths are reproducible") {
  const SurplusConfig cfg{10.0, 0.2, 5.0, 0.05};
  const auto a = simulate_surplus(kFreq, kSev, cfg, RngSeed{42});
  const auto b = simulate_surplus(kFreq, kSev, cfg, RngSeed{42});
  CHECK(a.surplus == b.surplus);
  CHECK(a.claim_times == b.claim_times);
}

TEST_CASE("interarrival pairs") {
  const FullParams p = FullParams::linked(kFreq, kSev);
  const auto pairs = sample_interarrival_pairs(p, 5000, RngSeed{3});
  REQUIRE(pairs.size() == 5000);
  for (const auto &c : pairs) {
    CHECK(c.t >= 0.0);
    CHECK(c.y > 0.0);
  }
  // both margins against their closed-form CDFs; 4 binomial sd at n = 5000 is 0.028
  const double nu = p.sev.nu;
  for (double q : {0.25, 0.5, 1.0, 2.0, 5.0}) {
    const double fy = nu * -std::expm1(-p.sev.mu * q) +
                      (1 - nu) * (1 - std::pow(p.sev.sigma / (p.sev.sigma + q), p.sev.delta));
    const double z = p.freq.beta / (p.freq.beta + q);
    const double ft = p.freq.p * (1 - std::pow(z, p.freq.alpha1)) +
                      (1 - p.freq.p) * (1 - std::pow(z, p.freq.alpha1 + p.freq.alpha2));
    double ey = 0.0;
    double et = 0.0;
    for (const auto &c : pairs) {
      ey += (c.y <= q) / 5000.0;
      et += (c.t <= q) / 5000.0;
    }
    CHECK(std::abs(ey - fy) <= 0.028);
    CHECK(std::abs(et - ft) <= 0.028);
  }
}
