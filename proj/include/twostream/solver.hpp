#ifndef TWOSTREAM_SOLVER_HPP_
#define TWOSTREAM_SOLVER_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twostream {

struct SolveOptions {
  double residual_tol = 1e-10;
  int max_iters = 200;
  double fd_step = 1e-6;
  double min_damping = 1e-8;
};

struct SolveReport {
  std::vector<double> root;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ResidualFn = std::function<std::vector<double>(const std::vector<double> &)>;

void validate(const SolveOptions &opts);

// Damped Newton iteration for a small square system F(x) = 0.
//
// The Jacobian is approximated by forward differences with step
// fd_step * max(1, |x_j|). Each Newton step is halved until the residual
// 2-norm decreases or the damping factor falls below min_damping, at which
// point the iteration gives up with SolverError. A non-finite residual at
// the starting point is also a SolverError; non-finite trial points are
// treated as failed line-search steps.
//
// Callers that need positive unknowns should solve in log coordinates.
SolveReport solve_system(const ResidualFn &residual_fn, std::vector<double> x0,
                         const SolveOptions &opts = {});

/// Solves A x = b by Gaussian elimination with partial pivoting. A is
/// row-major n x n. Throws SolverError when A is numerically singular.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b);

}  // namespace twostream

#endif  // TWOSTREAM_SOLVER_HPP_
