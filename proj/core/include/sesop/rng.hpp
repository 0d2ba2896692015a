#pragma once

#include "sesop/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace sesop {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, because the standard distributions differ between library
/// vendors: uniforms use the top 53 bits of one engine draw, normals use the
/// polar Box-Muller transform with the second variate cached. Matrices are
/// filled in column-major order.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Standard normal.
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  Index uniform_index(Index n);

  Vector normal_vector(Index n, double stddev = 1.0);
  Matrix normal_matrix(Index rows, Index cols, double stddev = 1.0);

  /// First k entries of a uniformly random permutation of 0..n-1
  /// (partial Fisher-Yates).
  std::vector<Index> sample_without_replacement(Index n, Index k);

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace sesop
