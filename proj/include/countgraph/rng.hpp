#pragma once

#include <cstdint>

namespace countgraph {

// Counter-based SplitMix64 stream.
//
// The state walks by the golden-ratio increment and every output is the
// SplitMix64 finalizer of the new state, so draw i from seed s equals
// mix64(s + (i+1) * 0x9E3779B97F4A7C15). Streams are therefore trivially
// reproducible from (seed, draw index) in any language.
//
// Substreams for parallel work are derived as
//   substream(seed, k) = Rng(mix64(seed ^ mix64((k+1) * 0x9E3779B97F4A7C15)))
// which keeps replicate streams independent of scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(seed ^ mix64((index + 1) * 0x9E3779B97F4A7C15ULL)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace countgraph
