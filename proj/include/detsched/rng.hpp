#ifndef DETSCHED_RNG_HPP
#define DETSCHED_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace detsched {

// All randomness in the project flows through a 64-bit Mersenne twister.
// Distributions below are hand-rolled from raw 64-bit draws so results are
// bit-identical across standard libraries.
using Rng = std::mt19937_64;

// Worker/realization streams derive from the master seed by addition.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(seed + stream);
}

// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double exponential(Rng& rng, double mean) {
  return -mean * std::log1p(-uniform01(rng));
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace detsched

#endif
