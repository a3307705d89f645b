#pragma once

#include <cmath>
#include <cstdint>

namespace percsolid {

// SplitMix64 finalizer.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: word(i) is a pure function of (seed, stream, i),
// so draws do not depend on evaluation order or thread count.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream)
      : key_(mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc908ULL))) {}

  uint64_t word(uint64_t counter) const {
    return mix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  // uniform in [0,1), 53 bits
  double u01(uint64_t counter) const { return (word(counter) >> 11) * 0x1.0p-53; }

  // unit-mean exponential by inverse CDF
  double exp1(uint64_t counter) const { return -std::log1p(-u01(counter)); }

  // uniform integer in [0, n), multiply-shift reduction
  uint32_t below(uint64_t counter, uint32_t n) const {
    return static_cast<uint32_t>((static_cast<__uint128_t>(word(counter)) * n) >> 64);
  }

 private:
  uint64_t key_;
};

// Stream ids for the independent sub-streams one config/experiment uses.
namespace rng_stream {
constexpr uint64_t occupancy = 0x01;
constexpr uint64_t walk = 0x02;
constexpr uint64_t sampling = 0x03;
constexpr uint64_t perforation = 0x04;
}  // namespace rng_stream

}  // namespace percsolid
