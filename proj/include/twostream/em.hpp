#ifndef TWOSTREAM_EM_HPP_
#define TWOSTREAM_EM_HPP_

#include <string>
#include <vector>

#include "twostream/solver.hpp"

namespace twostream {

struct EmOptions {
  /// Stop once no parameter moves by more than this in one iteration.
  double tol = 1e-3;
  int max_iters = 10000;
  /// ...or once the observed-data log-likelihood gains less than this.
  double loglik_tol = 1e-9;
  SolveOptions solve;
};

void validate(const EmOptions &opts);

enum class FitStatus { converged, max_iterations, degenerate };

const char *to_string(FitStatus status);

// Per-iteration record of an EM run. Entry 0 of both paths is the starting
// point; entry k is the state after k iterations.
template <class Params>
struct EmTrace {
  std::vector<Params> params_path;
  std::vector<double> loglik_path;
  bool converged = false;
  int iterations = 0;
  FitStatus status = FitStatus::max_iterations;
  std::string message;
};

template <class Params>
struct EmFit {
  Params params;
  EmTrace<Params> trace;
};

}  // namespace twostream

#endif  // TWOSTREAM_EM_HPP_
