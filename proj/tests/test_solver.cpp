#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "twostream/freq_em.hpp"
#include "twostream/rng.hpp"
#include "twostream/solver.hpp"

using namespace twostream;

namespace {

double norm(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("linear residual converges in one step") {
  const auto r = solve_system([](const std::vector<double> &x) { return std::vector<double>{x[0] - 3.25}; }, {-10.0});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.root[0] == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("x^2 - 4 from 3") {
  const auto r = solve_system([](const std::vector<double> &x) { return std::vector<double>{x[0] * x[0] - 4.0}; }, {3.0});
  CHECK(r.converged);
  CHECK(std::abs(r.root[0] - 2.0) <= 1e-10);
}

TEST_CASE("reported residual is the residual at the root") {
  auto f = [](const std::vector<double> &x) {
    return std::vector<double>{x[0] * x[0] + x[1] * x[1] - 4.0, x[0] * x[1] - 1.0};
  };
  const auto r = solve_system(f, {2.0, 0.3});
  REQUIRE(r.converged);
  CHECK(norm(f(r.root)) == r.residual_norm);
  CHECK(r.residual_norm <= SolveOptions{}.residual_tol);
}

TEST_CASE("step halving rescues a Newton overshoot") {
  // atan has a Newton cycle from |x0| > 1.39 without damping
  const auto r = solve_system([](const std::vector<double> &x) { return std::vector<double>{std::atan(x[0])}; }, {2.0});
  CHECK(r.converged);
  CHECK(std::abs(r.root[0]) < 1e-10);
}

TEST_CASE("random well-conditioned 3x3 linear systems") {
  Rng rng(RngSeed{8});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(9), b(3);
    for (auto &v : a) v = rng.uniform() - 0.5;
    for (int i = 0; i < 3; ++i) a[i * 3 + i] += 3.0;
    for (auto &v : b) v = 4.0 * rng.uniform() - 2.0;
    const auto direct = solve_linear(a, b);
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += a[i * 3 + j] * direct[j];
      CHECK(std::abs(s - b[i]) < 1e-12);
    }
    const auto r = solve_system(
        [&](const std::vector<double> &x) {
          std::vector<double> out(3);
          for (int i = 0; i < 3; ++i) {
            out[i] = -b[i];
            for (int j = 0; j < 3; ++j) out[i] += a[i * 3 + j] * x[j];
          }
          return out;
        },
        {0.0, 0.0, 0.0});
    REQUIRE(r.converged);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r.root[i] - direct[i]) <= 1e-10);
  }
}

TEST_CASE("failures") {
  CHECK_THROWS_AS(solve_linear({1.0, 2.0, 2.0, 4.0}, {1.0, 1.0}), SolverError);
  CHECK_THROWS_AS(solve_system([](const std::vector<double> &) { return std::vector<double>{1.0}; }, {0.0}),
                  SolverError);  // constant residual: singular Jacobian
  CHECK_THROWS_AS(solve_system([](const std::vector<double> &x) { return std::vector<double>{std::log(x[0])}; }, {-1.0}),
                  SolverError);  // non-finite at start
  CHECK_THROWS_AS(solve_system([](const std::vector<double> &x) { return std::vector<double>{x[0]}; },
                               {std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_system([](const std::vector<double> &x) { return x; }, {}), std::invalid_argument);
  // x^2 + 1 has no real root
  CHECK_THROWS_AS(solve_system([](const std::vector<double> &x) { return std::vector<double>{x[0] * x[0] + 1.0}; }, {1.0}),
                  SolverError);
  SolveOptions bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("max_iters exhausted is reported, not thrown") {
  SolveOptions opts;
  opts.max_iters = 2;
  const auto r = solve_system([](const std::vector<double> &x) { return std::vector<double>{std::exp(x[0]) - 1e6}; }, {0.0}, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}

TEST_CASE("frequency M-step root at large-count scale zeroes all three partials") {
  const FreqParams truth{97.558, 30.147, 0.019781, 0.593};
  const CountSample sample(sample_counts(truth, 180, RngSeed{12}));
  const auto tau = e_step_freq(truth, sample);
  const FreqParams next = m_step_freq(truth, sample, tau);
  const auto g = q_gradient_freq(next, sample, tau);
  // partials scaled by m, as the solver sees them
  const double m = static_cast<double>(sample.m());
  CHECK(std::abs(g[0] / m) <= 1e-8);
  CHECK(std::abs(g[1] / m) <= 1e-8);
  CHECK(std::abs(g[2] * next.beta / m) <= 1e-8);
}
