#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "topomuse/errors.hpp"

namespace topomuse {

/// Seedable random source with portable draw semantics. The engine is
/// std::mt19937_64, whose output stream is pinned by the standard; the
/// distribution logic lives here because the standard library distribution
/// objects are implementation-defined and would break cross-platform
/// reproducibility. Each sampling stream owns its Rng; there is no global
/// state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t nextU64() { return engine_(); }

  /// Uniform integer in [0, bound) via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw InternalError("rng: zero bound");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

  std::size_t index(std::size_t size) { return static_cast<std::size_t>(below(size)); }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-bound, bound).
  double symmetric(double bound) { return (2.0 * unit() - 1.0) * bound; }

  /// Index drawn proportionally to nonnegative integer weights.
  std::size_t weightedIndex(const std::vector<std::int64_t>& weights) {
    std::int64_t total = 0;
    for (const std::int64_t w : weights) {
      if (w < 0) throw InternalError("rng: negative weight");
      total += w;
    }
    if (total <= 0) throw EmptySamplingSupport("weighted draw over empty support");
    std::int64_t ticket = static_cast<std::int64_t>(below(static_cast<std::uint64_t>(total)));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (ticket < weights[i]) return i;
      ticket -= weights[i];
    }
    throw InternalError("rng: weighted draw fell through");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace topomuse
