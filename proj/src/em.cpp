#include "twostream/em.hpp"

#include <stdexcept>

namespace twostream {

void validate(const EmOptions &opts) {
  if (!(opts.tol > 0.0) || opts.max_iters < 1 || !(opts.loglik_tol > 0.0)) {
    throw std::invalid_argument("EmOptions: tolerances must be positive and max_iters >= 1");
  }
  validate(opts.solve);
}

const char *to_string(FitStatus status) {
  switch (status) {
    case FitStatus::converged:
      return "converged";
    case FitStatus::max_iterations:
      return "max_iterations";
    case FitStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

}  // namespace twostream
