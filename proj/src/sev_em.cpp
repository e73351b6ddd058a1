#include "twostream/sev_em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "em_loop.hpp"
#include "twostream/special_math.hpp"

namespace twostream {

namespace {

double xlogy(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(b); }

void check_tau(std::span<const double> tau, std::size_t m) {
  if (tau.size() != m) {
    throw std::invalid_argument("tau length " + std::to_string(tau.size()) +
                                " does not match sample size " + std::to_string(m));
  }
  for (double t : tau) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("tau entries must lie in [0, 1]");
    }
  }
}

// delta maximizing Q for a fixed sigma (root of dQ/ddelta).
double profile_delta(double sigma, const SeveritySample &sample, std::span<const double> tau,
                     double pareto_weight) {
  double s = 0.0;
  const auto &y = sample.values();
  for (std::size_t i = 0; i < y.size(); ++i) s += (1.0 - tau[i]) * std::log1p(y[i] / sigma);
  return pareto_weight / s;
}

// dQ/dsigma * sigma / W at the profiled delta; dimensionless.
double sigma_equation(double sigma, const SeveritySample &sample, std::span<const double> tau,
                      double pareto_weight) {
  const double delta = profile_delta(sigma, sample, tau, pareto_weight);
  double s = 0.0;
  const auto &y = sample.values();
  for (std::size_t i = 0; i < y.size(); ++i) s += (1.0 - tau[i]) * sigma / (sigma + y[i]);
  return delta - (delta + 1.0) * s / pareto_weight;
}

double max_abs_change(const SevParams &a, const SevParams &b) {
  return std::max({std::abs(a.mu - b.mu), std::abs(a.delta - b.delta),
                   std::abs(a.sigma - b.sigma), std::abs(a.nu - b.nu)});
}

bool finite_params(const SevParams &s) {
  constexpr double kCeiling = 1e10;
  return std::isfinite(s.mu) && std::isfinite(s.delta) && std::isfinite(s.sigma) &&
         s.mu > 0.0 && s.delta > 0.0 && s.sigma > 0.0 && s.delta < kCeiling &&
         s.sigma < kCeiling && s.mu < kCeiling;
}

}  // namespace

SeveritySample::SeveritySample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw std::invalid_argument("a severity sample needs at least two claims");
  }
  for (double y : values_) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw std::invalid_argument("claim sizes must be positive and finite, got " +
                                  std::to_string(y));
    }
  }
}

double nu_from_freq(const FreqParams &freq) {
  validate(freq);
  // B(a + 1, b) / B(a, b) = a / (a + b)
  return freq.p + (1.0 - freq.p) * freq.alpha1 / (freq.alpha1 + freq.alpha2);
}

std::vector<double> e_step_sev(const SevParams &params, const SeveritySample &sample) {
  validate(params);
  std::vector<double> tau;
  tau.reserve(sample.m_star());
  for (double y : sample.values()) {
    if (params.nu == 1.0) {
      tau.push_back(1.0);
      continue;
    }
    if (params.nu == 0.0) {
      tau.push_back(0.0);
      continue;
    }
    const double expo = std::log(params.nu) + std::log(params.mu) - params.mu * y;
    const double pareto =
        std::log1p(-params.nu) + lomax_log_pdf(params.delta, params.sigma, y);
    tau.push_back(std::exp(expo - log_add_exp(expo, pareto)));
  }
  return tau;
}

double q_value_sev(const SevParams &params, const SeveritySample &sample,
                   std::span<const double> tau) {
  validate(params);
  check_tau(tau, sample.m_star());
  double t_sum = 0.0;
  double ty_sum = 0.0;
  double w_sum = 0.0;
  double w_log = 0.0;
  const auto &y = sample.values();
  for (std::size_t i = 0; i < y.size(); ++i) {
    t_sum += tau[i];
    ty_sum += tau[i] * y[i];
    const double w = 1.0 - tau[i];
    w_sum += w;
    if (w > 0.0) w_log += w * std::log(params.sigma + y[i]);
  }
  return xlogy(t_sum, params.nu) + xlogy(t_sum, params.mu) - params.mu * ty_sum +
         xlogy(w_sum, 1.0 - params.nu) + xlogy(w_sum, params.delta) +
         params.delta * xlogy(w_sum, params.sigma) - (params.delta + 1.0) * w_log;
}

std::array<double, 3> q_gradient_sev(const SevParams &params, const SeveritySample &sample,
                                     std::span<const double> tau) {
  validate(params);
  check_tau(tau, sample.m_star());
  double t_sum = 0.0;
  double ty_sum = 0.0;
  double w_sum = 0.0;
  double w_log = 0.0;
  double w_inv = 0.0;
  const auto &y = sample.values();
  for (std::size_t i = 0; i < y.size(); ++i) {
    t_sum += tau[i];
    ty_sum += tau[i] * y[i];
    const double w = 1.0 - tau[i];
    w_sum += w;
    w_log += w * std::log(params.sigma + y[i]);
    w_inv += w / (params.sigma + y[i]);
  }
  return {t_sum / params.mu - ty_sum,
          w_sum / params.delta + w_sum * std::log(params.sigma) - w_log,
          w_sum * params.delta / params.sigma - (params.delta + 1.0) * w_inv};
}

SevParams m_step_sev(const SevParams &params, const SeveritySample &sample,
                     std::span<const double> tau, bool estimate_nu, const SolveOptions &opts) {
  validate(params);
  check_tau(tau, sample.m_star());
  const auto &y = sample.values();
  const double m_star = static_cast<double>(sample.m_star());
  double t_sum = 0.0;
  double ty_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    t_sum += tau[i];
    ty_sum += tau[i] * y[i];
  }
  if (!(ty_sum > 0.0)) {
    throw std::domain_error("severity M-step: sum of tau_i * y_i is zero, mu is undefined");
  }
  const double pareto_weight = m_star - t_sum;

  SevParams next = params;
  next.mu = t_sum / ty_sum;
  if (estimate_nu) next.nu = std::clamp(t_sum / m_star, 0.0, 1.0);
  if (pareto_weight <= 1e-12 * m_star) {
    // no claim is attributed to the Pareto component; its parameters stay
    return next;
  }

  auto with_sigma = [&](double sigma) {
    SevParams s = next;
    s.sigma = sigma;
    s.delta = profile_delta(sigma, sample, tau, pareto_weight);
    return s;
  };
  auto q_at = [&](double sigma) {
    const SevParams s = with_sigma(sigma);
    if (!(s.sigma > 0.0 && s.delta > 0.0 && std::isfinite(s.sigma) && std::isfinite(s.delta))) {
      return -std::numeric_limits<double>::infinity();
    }
    const double q = q_value_sev(s, sample, tau);
    return std::isnan(q) ? -std::numeric_limits<double>::infinity() : q;
  };
  // mu, nu and the profiled delta already raise Q at the current sigma
  const double q_now = q_at(params.sigma);

  double sigma = params.sigma;
  try {
    const auto report = solve_system(
        [&](const std::vector<double> &x) {
          return std::vector<double>{sigma_equation(std::exp(x[0]), sample, tau, pareto_weight)};
        },
        {std::log(sigma)}, opts);
    sigma = std::exp(report.root[0]);
  } catch (const SolverError &e) {
    throw SolverError(std::string("severity M-step: ") + e.what());
  }

  // tolerance at the roundoff level of Q itself
  const double slack = 1e-13 * std::max(1.0, std::abs(q_now));
  if (!(q_at(sigma) >= q_now - slack)) {
    const double l0 = std::log(params.sigma);
    const double l1 = std::log(sigma);
    double t = 0.5;
    bool found = false;
    for (int k = 0; k < 40 && !found; ++k, t *= 0.5) {
      const double c = std::exp(l0 + t * (l1 - l0));
      if (q_at(c) >= q_now - slack) {
        sigma = c;
        found = true;
      }
    }
    if (!found) sigma = params.sigma;
  }
  return with_sigma(sigma);
}

double observed_loglik_sev(const SevParams &params, const SeveritySample &sample) {
  double ll = 0.0;
  for (double y : sample.values()) ll += severity_mixture_log_pdf(params, y);
  return ll;
}

EmFit<SevParams> fit_sev(const SeveritySample &sample, const SevParams &init, bool estimate_nu,
                         const EmOptions &opts) {
  validate(init);
  validate(opts);
  return detail::run_em(
      init, opts,
      [&](const SevParams &cur) {
        const auto tau = e_step_sev(cur, sample);
        return m_step_sev(cur, sample, tau, estimate_nu, opts.solve);
      },
      [&](const SevParams &p) { return observed_loglik_sev(p, sample); }, max_abs_change,
      finite_params);
}

SevParams default_init_sev(const SeveritySample &sample, double nu) {
  const auto &y = sample.values();
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  SevParams init;
  init.mu = 1.0 / mean;
  init.delta = 3.0;
  init.sigma = 2.0 * mean;
  init.nu = nu;
  validate(init);
  return init;
}

}  // namespace twostream
