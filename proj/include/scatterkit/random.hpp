#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "scatterkit/signal.hpp"

namespace scatterkit {

// splitmix64 finalizer; derives independent child seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Signal white_noise(const GridShape& shape, std::uint64_t seed, double stddev = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  std::vector<double> v(shape.count());
  for (auto& x : v) x = normal(rng);
  return Signal::from_real(shape, v);
}

}  // namespace scatterkit
