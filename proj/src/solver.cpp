#include "twostream/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twostream {

namespace {

double norm2(const std::vector<double> &v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

bool all_finite(const std::vector<double> &v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> evaluate(const ResidualFn &fn, const std::vector<double> &x) {
  std::vector<double> r = fn(x);
  if (r.size() != x.size()) {
    throw SolverError("residual function changed dimension: " + std::to_string(x.size()) +
                      " -> " + std::to_string(r.size()));
  }
  return r;
}

}  // namespace

void validate(const SolveOptions &opts) {
  if (!(opts.residual_tol > 0.0) || opts.max_iters < 1 || !(opts.fd_step > 0.0) ||
      !(opts.min_damping > 0.0)) {
    throw std::invalid_argument("SolveOptions: all tolerances must be positive, max_iters >= 1");
  }
}

std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) {
    throw std::invalid_argument("solve_linear: matrix/vector size mismatch");
  }
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw SolverError("singular Jacobian");
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
    }
    if (std::abs(a[pivot * n + col]) <= 1e-14 * scale) {
      throw SolverError("singular Jacobian");
    }
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

SolveReport solve_system(const ResidualFn &residual_fn, std::vector<double> x0,
                         const SolveOptions &opts) {
  validate(opts);
  if (x0.empty() || !all_finite(x0)) {
    throw std::invalid_argument("solve_system: starting point must be non-empty and finite");
  }
  const std::size_t n = x0.size();
  SolveReport report;
  report.root = std::move(x0);
  std::vector<double> r = evaluate(residual_fn, report.root);
  if (!all_finite(r)) {
    throw SolverError("non-finite residual at the starting point");
  }
  report.residual_norm = norm2(r);

  while (report.residual_norm > opts.residual_tol && report.iterations < opts.max_iters) {
    std::vector<double> jac(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> xh = report.root;
      xh[j] += opts.fd_step * std::max(1.0, std::abs(xh[j]));
      const double h = xh[j] - report.root[j];  // the step actually taken
      const std::vector<double> rh = evaluate(residual_fn, xh);
      if (!all_finite(rh)) {
        throw SolverError("non-finite residual while differencing the Jacobian");
      }
      for (std::size_t i = 0; i < n; ++i) jac[i * n + j] = (rh[i] - r[i]) / h;
    }
    std::vector<double> neg_r(n);
    std::transform(r.begin(), r.end(), neg_r.begin(), [](double v) { return -v; });
    const std::vector<double> step = solve_linear(std::move(jac), std::move(neg_r));

    double damping = 1.0;
    for (;;) {
      std::vector<double> trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = report.root[i] + damping * step[i];
      if (all_finite(trial)) {
        std::vector<double> rt = evaluate(residual_fn, trial);
        const double nt = all_finite(rt) ? norm2(rt) : HUGE_VAL;
        if (nt < report.residual_norm) {
          report.root = std::move(trial);
          r = std::move(rt);
          report.residual_norm = nt;
          break;
        }
      }
      damping *= 0.5;
      if (damping < opts.min_damping) {
        throw SolverError("line search exhausted at residual norm " +
                          std::to_string(report.residual_norm) + " after " +
                          std::to_string(report.iterations) + " iterations");
      }
    }
    ++report.iterations;
  }
  report.converged = report.residual_norm <= opts.residual_tol;
  return report;
}

}  // namespace twostream
