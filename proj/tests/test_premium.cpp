#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "twostream/distributions.hpp"
#include "twostream/premium.hpp"
#include "twostream/quadrature.hpp"
#include "twostream/rng.hpp"
#include "twostream/sev_em.hpp"
#include "twostream/special_math.hpp"

using namespace twostream;

namespace {

const FreqParams kFreq{3.0, 1.0, 0.5, 0.6};
const SevParams kSev{1.0, 2.0, 0.5, 0.9};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Cumulative claim totals for the 12-period (0, 2, 1) scenario.
const std::vector<double> kCumY{0, 0, 2.52, 3.98, 3.98, 6.60, 8.07, 8.07, 10.59, 11.82, 11.82, 14.50, 15.83};

std::vector<PeriodRecord> scenario_021() {
  const std::uint64_t pattern[] = {0, 2, 1};
  std::vector<PeriodRecord> out;
  for (std::size_t k = 1; k <= 12; ++k) {
    PeriodRecord r;
    r.count = pattern[(k - 1) % 3];
    const double total = kCumY[k] - kCumY[k - 1];
    r.severities = std::vector<double>(r.count, total / std::max<double>(1.0, r.count));
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("ClaimHistory statistics") {
  ClaimHistory h;
  CHECK(h.m() == 0);
  CHECK(h.severities_recorded());
  h.add({2, std::vector<double>{1.5, 2.5}});
  h.add({0, std::vector<double>{}});
  CHECK(h.m() == 2);
  CHECK(h.sum_n() == 2);
  CHECK(h.m_star() == 2);
  CHECK(h.sum_y() == 4.0);
  CHECK(h.consistent());
  h.add({1, std::nullopt});
  CHECK_FALSE(h.severities_recorded());
  h.add({3, std::vector<double>{1.0}});
  CHECK_FALSE(h.consistent());
  CHECK_THROWS_AS(h.add({1, std::vector<double>{-1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(h.add({1, std::vector<double>{0.0}}), std::invalid_argument);
}

TEST_CASE("log_G") {
  CHECK(log_G({3, 1, 0.5, 0.6}, 0, 0) == std::log(0.4 / 0.6));
  CHECK(log_G(kFreq, 1, 0) == doctest::Approx(std::log(2.0 / 9.0)).epsilon(1e-14));
  CHECK(log_G({3, 1, 0.5, 1.0}, 4, 7) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_G({3, 1, 0.5, 0.0}, 1, 1), std::domain_error);
  CHECK_THROWS_AS(log_G(kFreq, -1, 0), std::invalid_argument);
}

TEST_CASE("log_G approaches its Stirling asymptote") {
  const FreqParams f{2.5, 1.7, 0.8, 0.4};
  const double m = 30.0;
  double last = HUGE_VAL;
  for (double n : {1e3, 1e4, 1e5}) {
    const double asym = std::log((1 - f.p) / f.p) + log_gamma(f.alpha1) -
                        log_gamma(f.alpha1 + f.alpha2) +
                        f.alpha2 * std::log(f.beta * n / (f.beta + m));
    const double ratio = std::exp(log_G(f, m, n) - asym);
    CHECK(std::abs(ratio - 1.0) <= 0.02);
    CHECK(std::abs(ratio - 1.0) < last);
    last = std::abs(ratio - 1.0);
  }
}

TEST_CASE("posterior_freq") {
  const auto prior = posterior_freq(kFreq, 0, 0);
  CHECK(prior.w == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(prior.shape_lo == 3.0);
  CHECK(prior.shape_hi == 4.0);
  CHECK(prior.rate == 0.5);

  const auto post = posterior_freq(kFreq, 5, 9);
  CHECK(post.shape_hi == post.shape_lo + kFreq.alpha2);
  CHECK(post.rate == 5.5);
  CHECK(posterior_freq({3, 1, 0.5, 0.0}, 5, 9).w == 0.0);
  CHECK(posterior_freq({3, 1, 0.5, 1.0}, 5, 9).w == 1.0);

  // the posterior density is a proper density with the premium as its mean
  Rng rng(RngSeed{31});
  for (int k = 0; k < 10; ++k) {
    const FreqParams f{0.5 + 5 * rng.uniform(), 0.5 + 5 * rng.uniform(), 0.2 + 2 * rng.uniform(),
                       0.05 + 0.9 * rng.uniform()};
    const double m = std::floor(1 + 10 * rng.uniform());
    const double n = std::floor(20 * rng.uniform());
    const auto p = posterior_freq(f, m, n);
    auto density = [&](double l) {
      if (!(l > 0.0)) return 0.0;
      return p.w * std::exp(gamma_log_pdf(p.shape_lo, p.rate, l)) +
             (1 - p.w) * std::exp(gamma_log_pdf(p.shape_hi, p.rate, l));
    };
    const double hi = (p.shape_hi + 80 * std::sqrt(p.shape_hi) + 80) / p.rate;
    const std::vector<double> br{0.0, p.shape_lo / p.rate, p.shape_hi / p.rate, hi};
    CHECK(std::abs(integrate_pieces(density, br) - 1.0) <= 1e-8);
    const double mean = integrate_pieces([&](double l) { return l * density(l); }, br);
    CHECK(rel_err(mean, premium_freq(f, m, n).value) <= 1e-8);
  }
}

TEST_CASE("premium_freq") {
  const auto prior = premium_freq(kFreq, 0, 0);
  CHECK(prior.value == doctest::Approx(6.8).epsilon(1e-14));
  CHECK(prior.value == doctest::Approx(count_mean(kFreq)).epsilon(1e-14));
  const auto one = premium_freq(kFreq, 1, 0);
  CHECK(one.weight == doctest::Approx(9.0 / 11.0).epsilon(1e-14));
  CHECK(one.value == doctest::Approx((9.0 / 11.0 * 3 + 2.0 / 11.0 * 4) / 1.5).epsilon(1e-14));
}

TEST_CASE("each branch is a credibility premium") {
  Rng rng(RngSeed{5});
  for (int k = 0; k < 200; ++k) {
    const double a = 0.1 + 20 * rng.uniform();
    const double beta = 0.01 + 5 * rng.uniform();
    const double m = std::floor(1 + 50 * rng.uniform());
    const double n = std::floor(200 * rng.uniform());
    const double z = m / (beta + m);
    const double cred = z * (n / m) + (1 - z) * (a / beta);
    CHECK(rel_err((n + a) / (beta + m), cred) <= 1e-12);
  }
}

TEST_CASE("log_phi") {
  CHECK(log_phi(kSev, 0, 0.0) == std::log((1.0 - kSev.nu) / kSev.nu));
  CHECK(std::exp(log_phi(kSev, 1, 1.0)) == doctest::Approx(0.044746).epsilon(1e-5));
  CHECK(log_phi({1, 2, 0.5, 1.0}, 3, 2.0) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_phi({1, 2, 0.5, 0.0}, 3, 2.0), std::domain_error);
  // exp(mu * sum_y) alone would overflow here
  const double big = log_phi({2.0, 2.0, 0.5, 0.9}, 400, 900.0);
  CHECK(std::isfinite(big));
  CHECK(big > 700.0);
  CHECK(posterior_sev({2.0, 2.0, 0.5, 0.9}, 400, 900.0).omega >= 0.0);
}

TEST_CASE("premium_sev") {
  const auto prior = premium_sev(kSev, 0, 0.0);
  CHECK(prior.value == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(prior.weight == doctest::Approx(0.9).epsilon(1e-14));
  const auto one = premium_sev(kSev, 1, 1.0);
  CHECK(one.weight == doctest::Approx(0.95717).epsilon(1e-5));
  CHECK(one.value == doctest::Approx(1.04283).epsilon(1e-5));
  CHECK(one.value == doctest::Approx(one.weight + (1 - one.weight) * 2.0).epsilon(1e-14));
  const SevParams pure{0.7, 2.0, 0.5, 1.0};
  CHECK(premium_sev(pure, 12, 40.0).value == 1.0 / 0.7);
  CHECK(premium_sev(pure, 12, 40.0).weight == 1.0);
}

TEST_CASE("weights stay in [0, 1] for extreme statistics") {
  Rng rng(RngSeed{8});
  for (int k = 0; k < 300; ++k) {
    const FreqParams f{0.1 + 50 * rng.uniform(), 0.1 + 50 * rng.uniform(), 1e-3 + rng.uniform(),
                       1e-6 + (1 - 2e-6) * rng.uniform()};
    const auto pf = posterior_freq(f, std::floor(1e4 * rng.uniform()), std::floor(1e6 * rng.uniform()));
    CHECK(pf.w >= 0.0);
    CHECK(pf.w <= 1.0);
    const SevParams s{0.1 + 5 * rng.uniform(), 0.2 + 10 * rng.uniform(), 0.1 + 5 * rng.uniform(),
                      1e-6 + (1 - 2e-6) * rng.uniform()};
    const auto ms = static_cast<std::uint64_t>(1e4 * rng.uniform());
    const auto ps = posterior_sev(s, ms, 1e4 * rng.uniform());
    CHECK(ps.omega >= 0.0);
    CHECK(ps.omega <= 1.0);
  }
}

TEST_CASE("closed forms agree with the quadrature oracles") {
  Rng rng(RngSeed{101});
  double worst_f = 0.0;
  double worst_s = 0.0;
  for (int k = 0; k < 100; ++k) {
    const FreqParams f{0.3 + 10 * rng.uniform(), 0.3 + 10 * rng.uniform(), 0.05 + 3 * rng.uniform(),
                       0.05 + 0.9 * rng.uniform()};
    const double m = std::floor(30 * rng.uniform());
    const double n = std::floor(60 * rng.uniform());
    worst_f = std::max(worst_f, rel_err(premium_freq(f, m, n).value,
                                        posterior_mean_quadrature_freq(f, m, n)));
    const SevParams s{0.2 + 3 * rng.uniform(), 0.5 + 5 * rng.uniform(), 0.1 + 3 * rng.uniform(),
                      0.05 + 0.9 * rng.uniform()};
    const auto ms = static_cast<std::uint64_t>(20 * rng.uniform());
    const double sy = ms == 0 ? 0.0 : std::min(50.0 / s.mu, ms * (0.2 + 2 * rng.uniform()));
    worst_s = std::max(worst_s, rel_err(premium_sev(s, ms, sy).value,
                                        posterior_mean_quadrature_sev(s, ms, sy)));
  }
  CHECK(worst_f <= 1e-8);
  CHECK(worst_s <= 1e-8);
  CHECK(rel_err(posterior_mean_quadrature_freq(kFreq, 0, 0), count_mean(kFreq)) <= 1e-10);
}

TEST_CASE("no data gives back the prior") {
  const ClaimHistory empty;
  const auto q = premium_combined(kFreq, kSev, empty);
  CHECK(q.w == doctest::Approx(kFreq.p).epsilon(1e-15));
  CHECK(q.omega == doctest::Approx(kSev.nu).epsilon(1e-15));
  CHECK(q.freq_component == doctest::Approx(6.8).epsilon(1e-14));
  CHECK(q.sev_component == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(std::abs(q.premium - 8.84) <= 1e-12);
  CHECK(q.premium == q.freq_component * q.sev_component);
  CHECK_FALSE(q.frequency_only);
}

TEST_CASE("frequency-only quotes use the prior severity mean") {
  ClaimHistory h;
  h.add({2, std::nullopt});
  h.add({0, std::nullopt});
  const auto q = premium_combined(kFreq, kSev, h);
  CHECK(q.frequency_only);
  CHECK(q.sev_component == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(q.freq_component == premium_freq(kFreq, 2, 2).value);
}

TEST_CASE("a zero-claim period lowers the frequency component") {
  Rng rng(RngSeed{12});
  for (int k = 0; k < 200; ++k) {
    const FreqParams f{0.2 + 10 * rng.uniform(), 0.2 + 10 * rng.uniform(), 0.05 + 3 * rng.uniform(),
                       0.01 + 0.98 * rng.uniform()};
    const double m = std::floor(40 * rng.uniform());
    const double n = std::floor(100 * rng.uniform());
    CHECK(premium_freq(f, m + 1, n).value < premium_freq(f, m, n).value);
  }
}

TEST_CASE("premium differences shrink over the (0, 2, 1) scenario") {
  const SevParams sev{1.0, 2.0, 0.5, nu_from_freq(kFreq)};
  const auto records = scenario_021();
  ClaimHistory h;
  std::vector<double> prem{premium_combined(kFreq, sev, h).premium};
  for (const auto &r : records) {
    h.add(r);
    prem.push_back(premium_combined(kFreq, sev, h).premium);
  }
  CHECK(std::abs(h.sum_y() - kCumY.back()) <= 1e-12);
  // compare like with like: same phase of the three-period cycle
  for (std::size_t k = 7; k <= 12; ++k) {
    CHECK(std::abs(prem[k] - prem[k - 1]) < std::abs(prem[k - 3] - prem[k - 4]));
  }
}

TEST_CASE("omega does not increase after the first claim") {
  const SevParams sev{1.0, 2.0, 0.5, nu_from_freq(kFreq)};
  ClaimHistory h;
  std::vector<double> omega;
  for (const auto &r : scenario_021()) {
    h.add(r);
    if (h.m_star() > 0) omega.push_back(premium_combined(kFreq, sev, h).omega);
  }
  REQUIRE(omega.size() >= 2);
  for (std::size_t k = 1; k < omega.size(); ++k) {
    CAPTURE(k);
    CHECK(omega[k] <= omega[k - 1]);
  }
}
