#include "tdreg/rng.hpp"

namespace tdreg {

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t seed, Stream id, std::uint64_t sub) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id),
                    static_cast<std::uint32_t>(sub & 0xffffffffu),
                    static_cast<std::uint32_t>(sub >> 32)};
  Rng rng(0);
  rng.engine_.seed(seq);
  return rng;
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

double Rng::normal(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

Vec Rng::normal_vector(Eigen::Index n, double stddev) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(0.0, stddev);
  return v;
}

Vec Rng::uniform_vector(Eigen::Index n, double lo, double hi) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace tdreg
