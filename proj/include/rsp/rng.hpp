#pragma once

#include "rsp/matrix.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace rsp {

/// Deterministic random stream. The engine is std::mt19937_64, but every
/// derived draw (uniform doubles, normals, bounded integers) is implemented
/// here rather than with std::*_distribution, so the byte-level output
/// depends only on this file and not on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 is shifted into (0, 1] so the log stays finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, bound), unbiased via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t cut = max - max % bound;  // multiple of bound
    std::uint64_t x = engine_();
    while (x >= cut) x = engine_();
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent child seed from a base seed and two stream
/// coordinates (e.g. grid cell and trial index). Three rounds of splitmix64
/// mixing keep distinct coordinates from colliding in practice.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = detail::splitmix64(base ^ 0xA0761D6478BD642FULL);
  h = detail::splitmix64(h ^ a);
  h = detail::splitmix64(h ^ b);
  return h;
}

/// rows x cols matrix of independent standard normals, filled row by row.
inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("gaussian_matrix: dimensions must be positive");
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = rng.normal();
  }
  return out;
}

}  // namespace rsp
