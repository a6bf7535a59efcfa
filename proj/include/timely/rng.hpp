#pragma once

#include <cstdint>

namespace timely {

// Counter-based generator: every draw is a pure function of the key
// (seed, stream, domain, counter).  There is no sequential state, so any
// subset of draws can be produced in any order, on any thread, and the
// result matches a serial run bit for bit.
//
// Key layout used by the simulators:
//   stream  = interval index (one substream per interval)
//   domain  = kind of draw within the interval (channel vs. chain step)
//   counter = draw index inside the domain
//
// The mixer is the 64-bit finalizer from SplitMix64 (Stafford mix13).
// Each key word gets its own round, absorbed into an already-mixed state
// with a distinct odd constant.  One raw word per round matters: summing
// two raw words in one round would let (seed, stream) pairs with equal
// totals collide, turning neighbouring seeds into shifted copies of the
// same draw sequence.
class CounterRng {
 public:
  static constexpr std::uint64_t kChannelDomain = 0;
  static constexpr std::uint64_t kChainDomain = 1;
  static constexpr std::uint64_t kGeometryDomain = 2;

  static std::uint64_t bits(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t domain, std::uint64_t counter) {
    std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ull);
    h = mix(h + 0xbf58476d1ce4e5b9ull + stream);
    h = mix(h + 0x94d049bb133111ebull + domain);
    h = mix(h + 0x2545f4914f6cdd1dull + counter);
    return h;
  }

  // Uniform double in [0, 1), 53 significant bits.
  static double uniform(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t domain, std::uint64_t counter) {
    return static_cast<double>(bits(seed, stream, domain, counter) >> 11) *
           0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }
};

}  // namespace timely
