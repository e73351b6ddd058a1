#include "twostream/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "twostream/quadrature.hpp"
#include "twostream/sev_em.hpp"
#include "twostream/special_math.hpp"

namespace twostream {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// E[xi] and E[1 - xi] under Beta(a, b), by quadrature over the two halves
// of (0, 1). A shape below 1 makes the density singular at that end; the
// substitution xi = u^(1/a) (resp. 1 - xi = v^(1/b)) removes the singularity.
struct SplitMoments {
  double historical = 0.0;
  double unforeseeable = 0.0;
};

SplitMoments split_moments(double a, double b, const GaussLegendreRule &rule) {
  const double log_b = log_beta(a, b);
  auto beta_pdf = [&](double xi) {
    return std::exp((a - 1.0) * std::log(xi) + (b - 1.0) * std::log1p(-xi) - log_b);
  };
  SplitMoments out;
  auto accumulate = [&](auto &&weight_fn) {
    double lower = 0.0;
    double upper = 0.0;
    if (a < 1.0) {
      const double scale = std::exp(-log_b) / a;
      lower = integrate_fixed(
          [&](double u) {
            const double xi = std::pow(u, 1.0 / a);
            return scale * std::pow(1.0 - xi, b - 1.0) * weight_fn(xi);
          },
          0.0, std::pow(0.5, a), rule);
    } else {
      lower = integrate_fixed([&](double xi) { return beta_pdf(xi) * weight_fn(xi); }, 0.0, 0.5,
                              rule);
    }
    if (b < 1.0) {
      const double scale = std::exp(-log_b) / b;
      upper = integrate_fixed(
          [&](double v) {
            const double xi = 1.0 - std::pow(v, 1.0 / b);
            return scale * std::pow(xi, a - 1.0) * weight_fn(xi);
          },
          0.0, std::pow(0.5, b), rule);
    } else {
      upper = integrate_fixed([&](double xi) { return beta_pdf(xi) * weight_fn(xi); }, 0.5, 1.0,
                              rule);
    }
    return lower + upper;
  };
  out.historical = accumulate([](double xi) { return xi; });
  out.unforeseeable = accumulate([](double xi) { return 1.0 - xi; });
  return out;
}

double joint_log_density(const FullParams &params, const SplitMoments &moments, double t,
                         double y) {
  if (!(t >= 0.0) || !(y > 0.0)) {
    throw std::domain_error("joint density needs t >= 0 and y > 0");
  }
  const auto &f = params.freq;
  const auto &s = params.sev;
  const double log_f = std::log(s.mu) - s.mu * y;
  const double log_g = lomax_log_pdf(s.delta, s.sigma, y);
  const double log_wait_lo = lomax_log_pdf(f.alpha1, f.beta, t);
  const double log_wait_hi = lomax_log_pdf(f.alpha1 + f.alpha2, f.beta, t);
  const double log_mix = log_add_exp(log_f + safe_log(moments.historical),
                                     log_g + safe_log(moments.unforeseeable));
  return log_add_exp(safe_log(1.0 - f.p) + log_wait_hi + log_mix,
                     safe_log(f.p) + log_f + log_wait_lo);
}

void check_nodes(int quad_nodes) {
  if (quad_nodes < 4) {
    throw std::invalid_argument("joint density quadrature needs at least 4 nodes, got " +
                                std::to_string(quad_nodes));
  }
}

}  // namespace

FullParams FullParams::linked(const FreqParams &freq, SevParams sev) {
  sev.nu = nu_from_freq(freq);
  return {freq, sev};
}

void validate(const FullParams &params, bool linked) {
  validate(params.freq);
  validate(params.sev);
  if (linked && std::abs(params.sev.nu - nu_from_freq(params.freq)) > 1e-12) {
    throw std::invalid_argument("severity nu is not the value implied by the frequency model");
  }
}

double global_loglik(const FullParams &params, std::span<const PeriodRecord> data) {
  validate(params);
  double counts = 0.0;
  double sizes = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto &rec = data[i];
    const std::size_t recorded = rec.severities ? rec.severities->size() : 0;
    if (recorded != rec.count) {
      throw std::invalid_argument("period " + std::to_string(i) + " has " +
                                  std::to_string(rec.count) + " claims but " +
                                  std::to_string(recorded) + " severities");
    }
    counts += nb_mixture_log_pmf(params.freq, rec.count);
    if (rec.severities) {
      for (double y : *rec.severities) sizes += severity_mixture_log_pdf(params.sev, y);
    }
  }
  return counts + sizes;
}

double joint_ty_log_density(const FullParams &params, double t, double y, int quad_nodes) {
  validate(params);
  check_nodes(quad_nodes);
  const auto rule = gauss_legendre(quad_nodes);
  const auto moments = split_moments(params.freq.alpha1, params.freq.alpha2, rule);
  return joint_log_density(params, moments, t, y);
}

double joint_sample_loglik(const FullParams &params, std::span<const InterarrivalClaim> pairs,
                           int quad_nodes) {
  validate(params);
  check_nodes(quad_nodes);
  if (pairs.empty()) {
    throw std::invalid_argument("joint_sample_loglik needs at least one pair");
  }
  const auto rule = gauss_legendre(quad_nodes);
  const auto moments = split_moments(params.freq.alpha1, params.freq.alpha2, rule);
  double total = 0.0;
  for (const auto &pair : pairs) total += joint_log_density(params, moments, pair.t, pair.y);
  return total;
}

}  // namespace twostream
