#pragma once

#include <cstdint>
#include <random>

namespace gsc {

// Uniform double in [0, 1) built from the top 53 bits, platform independent.
inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline uint64_t uniformIndex(std::mt19937_64 &rng, uint64_t n) {
  return n == 0 ? 0 : static_cast<uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

}  // namespace gsc
