#ifndef TWOSTREAM_SRC_EM_LOOP_HPP_
#define TWOSTREAM_SRC_EM_LOOP_HPP_

#include <cmath>
#include <string>
#include <utility>

#include "twostream/em.hpp"
#include "twostream/solver.hpp"

namespace twostream::detail {

// Shared E/M alternation. `step` maps the current parameters to the next
// ones (E-step followed by M-step); `distance` is the max absolute change
// between two parameter sets.
template <class Params, class Step, class LogLik, class Distance, class Finite>
EmFit<Params> run_em(const Params &init, const EmOptions &opts, Step &&step, LogLik &&loglik,
                     Distance &&distance, Finite &&finite) {
  EmFit<Params> fit{init, {}};
  auto &trace = fit.trace;
  trace.params_path.push_back(init);
  trace.loglik_path.push_back(loglik(init));

  Params current = init;
  for (int it = 1; it <= opts.max_iters; ++it) {
    Params next;
    try {
      next = step(current);
    } catch (const SolverError &e) {
      trace.status = FitStatus::degenerate;
      trace.message = "M-step failed at iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    if (!finite(next)) {
      trace.status = FitStatus::degenerate;
      trace.message = "parameters left the finite range at iteration " + std::to_string(it);
      break;
    }
    const double ll = loglik(next);
    const double gain = ll - trace.loglik_path.back();
    const double change = distance(current, next);
    current = next;
    trace.params_path.push_back(current);
    trace.loglik_path.push_back(ll);
    trace.iterations = it;
    if (change < opts.tol || std::abs(gain) < opts.loglik_tol) {
      trace.status = FitStatus::converged;
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged && trace.status == FitStatus::max_iterations) {
    trace.message = "no convergence after " + std::to_string(opts.max_iters) + " iterations";
  }
  fit.params = current;
  return fit;
}

}  // namespace twostream::detail

#endif  // TWOSTREAM_SRC_EM_LOOP_HPP_
