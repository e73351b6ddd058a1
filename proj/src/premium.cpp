#include "twostream/premium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "twostream/quadrature.hpp"
#include "twostream/special_math.hpp"

namespace twostream {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_statistics(double exposure, double sum) {
  if (!(exposure >= 0.0) || !(sum >= 0.0) || !std::isfinite(exposure) || !std::isfinite(sum)) {
    throw std::invalid_argument("history statistics must be finite and non-negative");
  }
}

// Integration window for a Gamma-shaped posterior piece: from 0 to well
// past the mean of the wider component, with breaks at the component means.
std::vector<double> gamma_window(std::initializer_list<double> shapes, double rate) {
  double upper = 0.0;
  std::vector<double> breaks{0.0};
  for (double s : shapes) {
    const double mean = s / rate;
    const double sd = std::sqrt(s) / rate;
    upper = std::max(upper, mean + 60.0 * sd + 60.0 / rate);
    if (mean - 10.0 * sd > 0.0) breaks.push_back(mean - 10.0 * sd);
    breaks.push_back(mean);
    breaks.push_back(mean + 10.0 * sd);
  }
  breaks.push_back(upper);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

}  // namespace

ClaimHistory::ClaimHistory(const std::vector<PeriodRecord> &periods) {
  for (const auto &p : periods) add(p);
}

void ClaimHistory::add(PeriodRecord record) {
  if (record.severities) {
    for (double y : *record.severities) {
      if (!(y > 0.0) || !std::isfinite(y)) {
        throw std::invalid_argument("claim sizes must be positive and finite");
      }
      sum_y_ += y;
    }
    m_star_ += record.severities->size();
    if (record.severities->size() != record.count) ++mismatched_;
  } else {
    ++missing_severities_;
  }
  sum_n_ += record.count;
  periods_.push_back(std::move(record));
}

double log_G(const FreqParams &freq, double exposure, double sum_n) {
  validate(freq);
  check_statistics(exposure, sum_n);
  if (freq.p == 0.0) {
    throw std::domain_error("log_G: p = 0 puts all prior mass on the unforeseeable component");
  }
  if (freq.p == 1.0) return kNegInf;
  const double lead = std::log((1.0 - freq.p) / freq.p);
  if (exposure == 0.0 && sum_n == 0.0) return lead;
  return lead + log_beta(freq.alpha1, freq.alpha2) -
         log_beta(sum_n + freq.alpha1, freq.alpha2) +
         freq.alpha2 * (std::log(freq.beta) - std::log(freq.beta + exposure));
}

PosteriorFreq posterior_freq(const FreqParams &freq, double exposure, double sum_n) {
  PosteriorFreq post;
  post.w = freq.p == 0.0 ? 0.0 : logistic_complement(log_G(freq, exposure, sum_n));
  check_statistics(exposure, sum_n);
  post.shape_lo = sum_n + freq.alpha1;
  post.shape_hi = post.shape_lo + freq.alpha2;
  post.rate = freq.beta + exposure;
  return post;
}

WeightedPremium premium_freq(const FreqParams &freq, double exposure, double sum_n) {
  const PosteriorFreq post = posterior_freq(freq, exposure, sum_n);
  return {post.w * post.shape_lo / post.rate + (1.0 - post.w) * post.shape_hi / post.rate, post.w};
}

double log_phi(const SevParams &sev, std::uint64_t m_star, double sum_y) {
  validate(sev);
  check_statistics(static_cast<double>(m_star), sum_y);
  if (sev.nu == 0.0) {
    throw std::domain_error("log_phi: nu = 0 puts all prior mass on the Gamma component");
  }
  if (sev.nu == 1.0) return kNegInf;
  const double lead = std::log((1.0 - sev.nu) / sev.nu);
  if (m_star == 0 && sum_y == 0.0) return lead;
  const double ms = static_cast<double>(m_star);
  return lead + log_gamma(ms + sev.delta) -
         log_gamma(sev.delta) + sev.delta * std::log(sev.sigma) -
         (ms + sev.delta) * std::log(sev.sigma + sum_y) - ms * std::log(sev.mu) + sev.mu * sum_y;
}

PosteriorSev posterior_sev(const SevParams &sev, std::uint64_t m_star, double sum_y) {
  PosteriorSev post;
  post.omega = sev.nu == 0.0 ? 0.0 : logistic_complement(log_phi(sev, m_star, sum_y));
  check_statistics(static_cast<double>(m_star), sum_y);
  post.gamma_shape = static_cast<double>(m_star) + sev.delta;
  post.gamma_rate = sev.sigma + sum_y;
  post.atom = sev.mu;
  return post;
}

WeightedPremium premium_sev(const SevParams &sev, std::uint64_t m_star, double sum_y) {
  const PosteriorSev post = posterior_sev(sev, m_star, sum_y);
  return {post.omega / post.atom + (1.0 - post.omega) * post.gamma_shape / post.gamma_rate,
          post.omega};
}

PremiumQuote premium_combined(const FreqParams &freq, const SevParams &sev,
                              const ClaimHistory &hist) {
  PremiumQuote quote;
  const auto f = premium_freq(freq, static_cast<double>(hist.m()), static_cast<double>(hist.sum_n()));
  quote.frequency_only = !hist.severities_recorded();
  const auto s = quote.frequency_only ? premium_sev(sev, 0, 0.0)
                                      : premium_sev(sev, hist.m_star(), hist.sum_y());
  quote.freq_component = f.value;
  quote.sev_component = s.value;
  quote.premium = f.value * s.value;
  quote.w = f.weight;
  quote.omega = s.weight;
  return quote;
}

double posterior_mean_quadrature_freq(const FreqParams &freq, double exposure, double sum_n) {
  validate(freq);
  check_statistics(exposure, sum_n);
  // log of Poisson likelihood (up to constants) times the mixture prior
  auto log_kernel = [&](double lambda) {
    return sum_n * std::log(lambda) - exposure * lambda + gamma_mixture_prior_log_pdf(freq, lambda);
  };
  const double rate = freq.beta + exposure;
  const double s_lo = sum_n + freq.alpha1;
  const double s_hi = s_lo + freq.alpha2;
  const auto breaks = gamma_window({s_lo, s_hi}, rate);
  double offset = kNegInf;
  for (double b : breaks) {
    if (b > 0.0) offset = std::max(offset, log_kernel(b));
  }
  auto density = [&](double lambda) {
    return lambda > 0.0 ? std::exp(log_kernel(lambda) - offset) : 0.0;
  };
  const double mass = integrate_pieces(density, breaks, 1e-10);
  const double first = integrate_pieces([&](double l) { return l * density(l); }, breaks, 1e-10);
  return first / mass;
}

double posterior_mean_quadrature_sev(const SevParams &sev, std::uint64_t m_star, double sum_y) {
  validate(sev);
  check_statistics(static_cast<double>(m_star), sum_y);
  const double ms = static_cast<double>(m_star);
  // atom at theta = mu carries nu * mu^m* * exp(-mu * sum_y)
  const double log_atom = sev.nu > 0.0 ? std::log(sev.nu) + ms * std::log(sev.mu) - sev.mu * sum_y
                                       : kNegInf;
  auto log_cont = [&](double theta) {
    return std::log1p(-sev.nu) + ms * std::log(theta) - theta * sum_y +
           gamma_log_pdf(sev.delta, sev.sigma, theta);
  };
  if (sev.nu == 1.0) return 1.0 / sev.mu;

  const auto breaks = gamma_window({ms + sev.delta}, sev.sigma + sum_y);
  double offset = log_atom;
  for (double b : breaks) {
    if (b > 0.0) offset = std::max(offset, log_cont(b));
  }
  auto density = [&](double theta) {
    return theta > 0.0 ? std::exp(log_cont(theta) - offset) : 0.0;
  };
  const double atom = std::exp(log_atom - offset);
  const double mass = atom + integrate_pieces(density, breaks, 1e-10);
  // The severity premium averages the exponential mean 1/mu on the atom with
  // the rate itself on the continuous part, mirroring the closed form.
  const double first =
      atom / sev.mu + integrate_pieces([&](double t) { return t * density(t); }, breaks, 1e-10);
  return first / mass;
}

}  // namespace twostream
