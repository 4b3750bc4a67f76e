#pragma once

#include <cstdint>
#include <limits>

namespace ucal {

// Counter-based 64-bit generator: output i is splitmix64(seed + i * gamma).
// Every draw is a pure function of (seed, counter), so runs replay exactly
// on any platform. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(seed_ + (++counter_) * kGamma); }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound] inclusive, unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == max()) return (*this)();
    const std::uint64_t range = bound + 1;
    const std::uint64_t limit = max() - (max() % range);
    std::uint64_t draw;
    do {
      draw = (*this)();
    } while (draw >= limit);
    return draw % range;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace ucal
