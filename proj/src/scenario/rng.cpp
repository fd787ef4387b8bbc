#include "gridbench/scenario/rng.hpp"

#include <cmath>
#include <numbers>

#include "gridbench/error.hpp"

namespace gridbench::scenario {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ValidationError("uniform_index needs a nonempty range");
  const std::uint64_t range = n;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return static_cast<std::size_t>(x % range);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::choose(std::span<const double> probabilities) {
  if (probabilities.empty()) throw ValidationError("cannot choose from an empty probability vector");
  const double u = uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last = i;
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return last;  // rounding left u above the running sum
}

}  // namespace gridbench::scenario
