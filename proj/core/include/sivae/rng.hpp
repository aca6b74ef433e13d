#pragma once

#include "sivae/types.hpp"

#include <random>

namespace sivae {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to (master, stream); used to hand every
/// component, replication or task its own generator.
constexpr Seed derive_seed(Seed master, Seed stream) noexcept {
  Seed z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(Seed master, Seed stream) { return Rng(derive_seed(master, stream)); }

inline Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = dist(rng);
  return out;
}

}  // namespace sivae
