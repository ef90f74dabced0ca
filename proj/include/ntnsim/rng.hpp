#pragma once

// Deterministic random streams.
//
// Every random quantity in a run is drawn from a stream derived from
// (master_seed, drop_index, role, entity indices) through a stateless
// 64-bit mixer.  Streams are therefore independent of evaluation order and
// of the number of worker threads, which is what makes campaign results
// bit-identical for a fixed (config, seed) pair.

#include <cmath>
#include <cstdint>

#include "ntnsim/math.hpp"

namespace ntnsim {

// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Folds one key word into a seed.  Chain calls to derive nested substreams:
// derive(derive(master, drop), role) ...
inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t word) {
  return mix64(seed ^ (mix64(word + kGolden) | 1ull));
}

inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b) {
  return derive(derive(seed, a), b);
}
inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b, std::uint64_t c) {
  return derive(derive(seed, a, b), c);
}

// Sequential generator over a derived seed (splitmix64).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (one draw used, no caching, so the
  // stream position stays a pure function of the number of calls).
  double gauss() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Exponential with unit mean (|h|^2 of a CN(0,1) Rayleigh channel).
  double exponential() { return -std::log(uniform_pos()); }

  // Poisson sampler, exact for any mean.  Knuth's product method applied in
  // chunks small enough that exp(-chunk) stays normal.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = std::min(mean, 500.0);
      mean -= chunk;
      const double limit = std::exp(-chunk);
      double p = 1.0;
      std::uint64_t k = 0;
      do {
        ++k;
        p *= uniform_pos();
      } while (p > limit);
      total += k - 1;
    }
    return total;
  }

 private:
  std::uint64_t state_;
};

// One standard normal drawn directly from a derived seed, for quantities
// keyed per entity pair (e.g. shadow fading per cell-user link).
inline double gauss_at(std::uint64_t seed) {
  Stream s(seed);
  return s.gauss();
}

// One uniform in [0,1) drawn directly from a derived seed.
inline double uniform_at(std::uint64_t seed) {
  Stream s(seed);
  return s.uniform();
}

}  // namespace ntnsim
