#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace gridbench::scenario {

/// Seeded generator whose draws are identical on every platform: only the
/// raw 64-bit engine output is used, never the std distributions (their
/// algorithms are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  /// Index drawn with the given probabilities (which sum to 1).
  std::size_t choose(std::span<const double> probabilities);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gridbench::scenario
