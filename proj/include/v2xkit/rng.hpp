#pragma once

#include <cstdint>

namespace v2xkit {

// Deterministic 64-bit generator used everywhere randomness is needed.
//
// The algorithm is SplitMix64, written out in full so the byte streams the
// toolkit emits can be reproduced from this file alone, with no dependency on
// a particular standard library:
//
//   state += 0x9E3779B97F4A7C15            (advance by the 64-bit golden gamma)
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// The state is nothing but a counter offset by the seed, so draw n is a pure
// function of (seed, n). All derived draws below are fixed too:
//
//   next_double(): (output >> 11) * 2^-53, uniform on [0, 1)
//   uniform(lo, hi): lo + (hi - lo) * next_double()
//   next_below(n): output % n  (modulo bias is negligible for n << 2^64)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1). 53 random bits, so every value is an exact double.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace v2xkit
