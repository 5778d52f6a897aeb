#pragma once

#include <cstdint>
#include <random>

#include "tdreg/types.hpp"

namespace tdreg {

/// Independent random streams derived from one run seed. Keeping the
/// streams separate lets algorithm variants that share a seed see the same
/// initial parameters and the same environment noise.
enum class Stream : std::uint64_t {
  kInit = 1,
  kEnvironment = 2,
  kExploration = 3,
  kSampling = 4,
  kEvaluation = 5,
  kFeatures = 6,
  kCritic = 7,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t seed, Stream id, std::uint64_t sub = 0);

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal(double mean = 0.0, double stddev = 1.0);
  Vec normal_vector(Eigen::Index n, double stddev = 1.0);
  Vec uniform_vector(Eigen::Index n, double lo, double hi);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tdreg
