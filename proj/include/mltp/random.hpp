#pragma once

#include <cstdint>
#include <random>

#include "mltp/types.hpp"

namespace mltp {

/// SplitMix64 finalizer applied to `state`.
std::uint64_t splitmix64(std::uint64_t state);

/// Seed of trial `index` under `root`: splitmix64(root + (index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Deterministic generator. Only the raw mt19937_64 stream is used, with the
/// conversions written out here, so draws are identical across standard
/// libraries (std::*_distribution are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n);
  double normal();
  Complex complex_normal();
  /// Entry-wise complex Gaussian vector / matrix.
  Element gaussian_vector(std::size_t n);
  LinearMap gaussian_matrix(std::size_t rows, std::size_t cols);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mltp
