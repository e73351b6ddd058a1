#include "twostream/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <string>

namespace twostream {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: need at least one node");
  }
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's initial guess for the i-th root
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn_1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn_1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

double integrate_fixed(const std::function<double(double)> &f, double a, double b,
                       const GaussLegendreRule &rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          double rel_tol) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(f, a, b, rel_tol * 1e-2, &error, &l1);
  if (!std::isfinite(value) || error > rel_tol * std::max(l1, 1e-300)) {
    throw QuadratureError("adaptive quadrature on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "] did not reach tolerance (error " +
                          std::to_string(error) + ", L1 " + std::to_string(l1) + ")");
  }
  return value;
}

double integrate_pieces(const std::function<double(double)> &f, const std::vector<double> &breaks,
                        double rel_tol) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += integrate_adaptive(f, breaks[i], breaks[i + 1], rel_tol);
  }
  return total;
}

}  // namespace twostream
