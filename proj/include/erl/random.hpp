#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace erl {

// Seeded pseudo-random source. Every stochastic operation takes one of these
// explicitly; the library holds no hidden global generator.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  // Independent stream keyed by (master seed, name). Streams with different
  // names never share state, so toggling one component leaves the draws of
  // every other component untouched.
  static RandomStream derive(std::uint64_t master_seed, std::string_view name);

  double uniform();                                  // [0, 1)
  double uniform(double low, double high);           // [low, high)
  double normal(double mean = 0.0, double stddev = 1.0);
  std::size_t index(std::size_t n);                  // uniform in [0, n)
  std::uint64_t next_seed();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace erl
