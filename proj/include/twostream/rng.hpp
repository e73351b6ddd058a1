#ifndef TWOSTREAM_RNG_HPP_
#define TWOSTREAM_RNG_HPP_

#include <array>
#include <cstdint>

namespace twostream {

struct RngSeed {
  std::uint64_t seed = 0;
};

// xoshiro256** seeded through splitmix64. The stream is fully specified
// here so that a given seed reproduces the same draws on every platform;
// nothing in the library touches a global generator.
//
// Not thread-safe: give each thread (or each simulated path) its own Rng.
class Rng {
 public:
  explicit Rng(RngSeed seed);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();
  bool bernoulli(double p);
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  double beta(double a, double b);
  std::uint64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace twostream

#endif  // TWOSTREAM_RNG_HPP_
