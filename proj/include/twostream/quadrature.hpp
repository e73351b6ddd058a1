#ifndef TWOSTREAM_QUADRATURE_HPP_
#define TWOSTREAM_QUADRATURE_HPP_

#include <functional>
#include <stdexcept>
#include <vector>

namespace twostream {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule; nodes from Newton iteration on P_n. n >= 1.
GaussLegendreRule gauss_legendre(int n);

/// Fixed-rule integral of f over [a, b].
double integrate_fixed(const std::function<double(double)> &f, double a, double b,
                       const GaussLegendreRule &rule);

/// Adaptive integral over [a, b] (double-exponential rule, robust to
/// integrable endpoint singularities). Throws QuadratureError when the
/// error estimate exceeds rel_tol relative to the L1 norm of f.
double integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          double rel_tol = 1e-10);

/// Adaptive integral over consecutive pieces [b0, b1], [b1, b2], ...
double integrate_pieces(const std::function<double(double)> &f, const std::vector<double> &breaks,
                        double rel_tol = 1e-10);

}  // namespace twostream

#endif  // TWOSTREAM_QUADRATURE_HPP_
