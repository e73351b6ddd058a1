#include "twostream/freq_em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "em_loop.hpp"
#include "twostream/special_math.hpp"

namespace twostream {

namespace {

// a * log(b) with the convention 0 * log 0 = 0.
double xlogy(double a, double b) { return a == 0.0 ? 0.0 : a * std::log(b); }

double log_binom(double n, double shape) {
  return log_gamma(n + shape) - log_gamma(shape) - log_gamma(n + 1.0);
}

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

// Sufficient pieces of tau needed by the M-step.
struct TauSums {
  double lo = 0.0;  // sum tau
  double hi = 0.0;  // sum (1 - tau)
};

TauSums tau_sums(std::span<const double> tau) {
  TauSums s;
  for (double t : tau) {
    s.lo += t;
    s.hi += 1.0 - t;
  }
  return s;
}

// beta maximizing Q for fixed shapes: the root of dQ/dbeta.
double profile_beta(double a1, double a2, double m, double hi_weight, double total) {
  return (a1 * m + a2 * hi_weight) / total;
}

// Shape equations dQ/dalpha1 and dQ/dalpha2 with beta profiled out,
// divided by m so the residual scale does not grow with the sample.
struct ShapeEquations {
  const CountSample &sample;
  std::span<const double> tau;
  TauSums sums;

  std::array<double, 2> operator()(double a1, double a2) const {
    const double m = static_cast<double>(sample.m());
    const double beta = profile_beta(a1, a2, m, sums.hi, sample.total());
    const double log_ratio = std::log(beta / (1.0 + beta));
    const double psi_a1 = digamma(a1);
    const double psi_a12 = digamma(a1 + a2);
    double lo_part = 0.0;
    double hi_part = 0.0;
    const auto &counts = sample.counts();
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double n = static_cast<double>(counts[i]);
      if (n == 0.0) continue;
      lo_part += tau[i] * (digamma(n + a1) - psi_a1);
      hi_part += (1.0 - tau[i]) * (digamma(n + a1 + a2) - psi_a12);
    }
    return {(lo_part + hi_part + m * log_ratio) / m, (hi_part + sums.hi * log_ratio) / m};
  }
};

FreqParams with_shapes(FreqParams base, double a1, double a2, const CountSample &sample,
                       const TauSums &sums) {
  base.alpha1 = a1;
  base.alpha2 = a2;
  base.beta = profile_beta(a1, a2, static_cast<double>(sample.m()), sums.hi, sample.total());
  return base;
}

double max_abs_change(const FreqParams &a, const FreqParams &b) {
  return std::max({std::abs(a.alpha1 - b.alpha1), std::abs(a.alpha2 - b.alpha2),
                   std::abs(a.beta - b.beta), std::abs(a.p - b.p)});
}

bool finite_params(const FreqParams &f) {
  constexpr double kCeiling = 1e10;
  return std::isfinite(f.alpha1) && std::isfinite(f.alpha2) && std::isfinite(f.beta) &&
         f.alpha1 > 0.0 && f.alpha2 > 0.0 && f.beta > 0.0 && f.alpha1 < kCeiling &&
         f.alpha2 < kCeiling && f.beta < kCeiling;
}

double variance(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

CountSample::CountSample(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) {
    throw std::invalid_argument("a count sample needs at least two periods");
  }
  for (auto c : counts_) total_ += static_cast<double>(c);
}

bool CountSample::has_two_distinct_values() const {
  return std::any_of(counts_.begin(), counts_.end(),
                     [&](std::uint64_t c) { return c != counts_.front(); });
}

std::vector<double> e_step_freq(const FreqParams &params, const CountSample &sample) {
  validate(params);
  std::vector<double> tau;
  tau.reserve(sample.m());
  const double log_p = params.p > 0.0 ? std::log(params.p) : -HUGE_VAL;
  const double log_q = params.p < 1.0 ? std::log1p(-params.p) : -HUGE_VAL;
  for (auto n : sample.counts()) {
    if (params.p == 1.0) {
      tau.push_back(1.0);
      continue;
    }
    if (params.p == 0.0) {
      tau.push_back(0.0);
      continue;
    }
    const double lo = log_p + nb_log_pmf(params.alpha1, params.beta, n);
    const double hi = log_q + nb_log_pmf(params.alpha1 + params.alpha2, params.beta, n);
    tau.push_back(std::exp(lo - log_add_exp(lo, hi)));
  }
  return tau;
}

double q_value_freq(const FreqParams &params, const CountSample &sample,
                    std::span<const double> tau) {
  validate(params);
  check_tau(tau, sample.m());
  const TauSums sums = tau_sums(tau);
  const double m = static_cast<double>(sample.m());
  const double log_ratio = std::log(params.beta / (params.beta + 1.0));
  const double a12 = params.alpha1 + params.alpha2;

  double binom_lo = 0.0;
  double binom_hi = 0.0;
  const auto &counts = sample.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double n = static_cast<double>(counts[i]);
    if (tau[i] > 0.0) binom_lo += tau[i] * log_binom(n, params.alpha1);
    if (tau[i] < 1.0) binom_hi += (1.0 - tau[i]) * log_binom(n, a12);
  }
  return xlogy(sums.lo, params.p) + binom_lo + params.alpha1 * m * log_ratio -
         std::log1p(params.beta) * sample.total() + xlogy(sums.hi, 1.0 - params.p) + binom_hi +
         params.alpha2 * log_ratio * sums.hi;
}

std::array<double, 3> q_gradient_freq(const FreqParams &params, const CountSample &sample,
                                      std::span<const double> tau) {
  validate(params);
  check_tau(tau, sample.m());
  const TauSums sums = tau_sums(tau);
  const double m = static_cast<double>(sample.m());
  const double beta = params.beta;
  const double log_ratio = std::log(beta / (1.0 + beta));
  const double a1 = params.alpha1;
  const double a12 = params.alpha1 + params.alpha2;
  double lo_part = 0.0;
  double hi_part = 0.0;
  const auto &counts = sample.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double n = static_cast<double>(counts[i]);
    lo_part += tau[i] * (digamma(n + a1) - digamma(a1));
    hi_part += (1.0 - tau[i]) * (digamma(n + a12) - digamma(a12));
  }
  return {lo_part + hi_part + m * log_ratio, hi_part + sums.hi * log_ratio,
          (a1 * m + params.alpha2 * sums.hi - beta * sample.total()) / (beta * (1.0 + beta))};
}

FreqParams m_step_freq(const FreqParams &params, const CountSample &sample,
                       std::span<const double> tau, const SolveOptions &opts) {
  validate(params);
  check_tau(tau, sample.m());
  if (sample.total() == 0.0) {
    throw SolverError("all counts are zero; the Gamma rate has no finite maximizer");
  }
  const TauSums sums = tau_sums(tau);
  const double m = static_cast<double>(sample.m());

  FreqParams next = params;
  next.p = std::clamp(sums.lo / m, 0.0, 1.0);

  const ShapeEquations eq{sample, tau, sums};
  auto q_at = [&](double a1, double a2) {
    if (!(a1 > 0.0 && a2 > 0.0 && std::isfinite(a1) && std::isfinite(a2))) {
      return -std::numeric_limits<double>::infinity();
    }
    const double q = q_value_freq(with_shapes(next, a1, a2, sample, sums), sample, tau);
    return std::isnan(q) ? -std::numeric_limits<double>::infinity() : q;
  };
  // p and the profiled beta already raise Q at the current shapes
  const double q_now = q_at(params.alpha1, params.alpha2);

  double a1 = params.alpha1;
  double a2 = params.alpha2;
  // Degenerate responsibilities leave one shape unidentified; it is then
  // held fixed and a single-component fit is done for the other.
  const bool lo_only = sums.hi <= 1e-12 * m;
  const bool hi_only = sums.lo <= 1e-12 * m;
  try {
    if (lo_only) {
      const auto report = solve_system(
          [&](const std::vector<double> &x) {
            return std::vector<double>{eq(std::exp(x[0]), a2)[0]};
          },
          {std::log(a1)}, opts);
      a1 = std::exp(report.root[0]);
    } else if (hi_only) {
      // only a1 + a2 matters; keep the split ratio
      const double share = a1 / (a1 + a2);
      const auto report = solve_system(
          [&](const std::vector<double> &x) {
            const double total = std::exp(x[0]);
            return std::vector<double>{eq(share * total, (1.0 - share) * total)[1]};
          },
          {std::log(a1 + a2)}, opts);
      const double total = std::exp(report.root[0]);
      a1 = share * total;
      a2 = (1.0 - share) * total;
    } else {
      const auto report = solve_system(
          [&](const std::vector<double> &x) {
            const auto r = eq(std::exp(x[0]), std::exp(x[1]));
            return std::vector<double>{r[0], r[1]};
          },
          {std::log(a1), std::log(a2)}, opts);
      a1 = std::exp(report.root[0]);
      a2 = std::exp(report.root[1]);
    }
  } catch (const SolverError &e) {
    throw SolverError(std::string("frequency M-step: ") + e.what());
  }

  // Generalized-EM guard: Q must not fall below its value at the current shapes.
  // tolerance at the roundoff level of Q itself
  const double slack = 1e-13 * std::max(1.0, std::abs(q_now));
  if (!(q_at(a1, a2) >= q_now - slack)) {
    const double l1 = std::log(params.alpha1);
    const double l2 = std::log(params.alpha2);
    double t = 0.5;
    bool found = false;
    for (int k = 0; k < 40 && !found; ++k, t *= 0.5) {
      const double c1 = std::exp(l1 + t * (std::log(a1) - l1));
      const double c2 = std::exp(l2 + t * (std::log(a2) - l2));
      if (q_at(c1, c2) >= q_now - slack) {
        a1 = c1;
        a2 = c2;
        found = true;
      }
    }
    if (!found) {
      a1 = params.alpha1;
      a2 = params.alpha2;
    }
  }
  return with_shapes(next, a1, a2, sample, sums);
}

double observed_loglik_freq(const FreqParams &params, const CountSample &sample) {
  double ll = 0.0;
  for (auto n : sample.counts()) ll += nb_mixture_log_pmf(params, n);
  return ll;
}

EmFit<FreqParams> fit_freq(const CountSample &sample, const FreqParams &init,
                           const EmOptions &opts) {
  validate(init);
  validate(opts);
  if (!sample.has_two_distinct_values()) {
    EmFit<FreqParams> fit{init, {}};
    fit.trace.params_path.push_back(init);
    fit.trace.loglik_path.push_back(observed_loglik_freq(init, sample));
    fit.trace.status = FitStatus::degenerate;
    fit.trace.message = "all counts are equal; the mixture is not identifiable";
    return fit;
  }
  return detail::run_em(
      init, opts,
      [&](const FreqParams &cur) {
        const auto tau = e_step_freq(cur, sample);
        return m_step_freq(cur, sample, tau, opts.solve);
      },
      [&](const FreqParams &p) { return observed_loglik_freq(p, sample); }, max_abs_change,
      finite_params);
}

FreqParams moment_init_freq(const CountSample &sample) {
  const std::size_t m = sample.m();
  if (m < 4) {
    throw std::invalid_argument("moment initialization needs at least 4 counts");
  }
  std::vector<double> x(sample.counts().begin(), sample.counts().end());
  const double mean = mean_of(x);
  const double var = variance(x, mean);
  if (!(var > mean)) {
    throw UnderdispersionError("sample variance " + std::to_string(var) +
                               " does not exceed the mean " + std::to_string(mean) +
                               "; a mixed Poisson model cannot fit underdispersed counts");
  }
  std::sort(x.begin(), x.end());

  // Sturges histogram; the two tallest local modes define the split point.
  const std::size_t bins = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(m)))) + 1;
  const double lo = x.front();
  const double width = (x.back() - lo) / static_cast<double>(bins);
  std::vector<std::size_t> hist(bins, 0);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    hist[std::min(b, bins - 1)]++;
  }
  std::vector<std::size_t> modes;
  for (std::size_t b = 0; b < bins; ++b) {
    const bool left_ok = b == 0 || hist[b] >= hist[b - 1];
    const bool right_ok = b + 1 == bins || hist[b] > hist[b + 1];
    if (hist[b] > 0 && left_ok && right_ok) modes.push_back(b);
  }
  std::sort(modes.begin(), modes.end(),
            [&](std::size_t a, std::size_t b) { return hist[a] > hist[b]; });

  double split = 0.5 * (x[(m - 1) / 2] + x[m / 2]);
  if (modes.size() >= 2) {
    const double c0 = lo + (static_cast<double>(modes[0]) + 0.5) * width;
    const double c1 = lo + (static_cast<double>(modes[1]) + 0.5) * width;
    split = 0.5 * (c0 + c1);
  }
  auto cut = std::upper_bound(x.begin(), x.end(), split);
  if (cut - x.begin() < 2 || x.end() - cut < 2) {
    // median split, by position so both parts are non-empty even with ties
    cut = x.begin() + static_cast<std::ptrdiff_t>(m / 2);
  }
  const std::span<const double> low(x.data(), static_cast<std::size_t>(cut - x.begin()));
  const std::span<const double> high(x.data() + low.size(), m - low.size());
  const double mean_lo = mean_of(low);
  const double mean_hi = mean_of(high);

  // Shared rate from the pooled within-part excess variance, var - mean = mean / beta.
  const double n_lo = static_cast<double>(low.size());
  const double n_hi = static_cast<double>(high.size());
  const double excess =
      n_lo * (variance(low, mean_lo) - mean_lo) + n_hi * (variance(high, mean_hi) - mean_hi);
  double beta = (n_lo * mean_lo + n_hi * mean_hi) / excess;
  if (!(excess > 0.0) || !std::isfinite(beta)) {
    beta = mean / (var - mean);
  }
  FreqParams init;
  init.beta = beta;
  init.alpha1 = std::max(beta * mean_lo, 1e-3);
  init.alpha2 = std::max(beta * mean_hi - init.alpha1, 0.1);
  init.p = n_lo / static_cast<double>(m);
  return init;
}

}  // namespace twostream
