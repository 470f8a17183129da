#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace nevo {

// Seedable random source with portable output. std::mt19937_64 has a
// standard-mandated sequence, but the <random> distributions do not, so all
// distribution logic lives here. The order in which the search consumes
// draws is part of the replay contract; see README "Determinism".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n). Rejection-sampled, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t raw = engine_();
    while (raw < threshold) raw = engine_();
    return raw % n;
  }

  // Uniform integer in [lo, hi], both ends inclusive.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    const std::uint64_t span =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) -
                                   static_cast<std::int64_t>(lo)) + 1;
    return lo + static_cast<int>(uniform_below(span));
  }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform_below(n));
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool coin() { return (engine_() & 1u) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nevo
