#ifndef CYCLEGAS_RNG_HPP
#define CYCLEGAS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "cyclegas/cycle.hpp"
#include "cyclegas/geometry.hpp"

namespace cyclegas {

// Streams are derived from a master seed and a list of integer salts, so any
// named piece of randomness (a cycle class, a translate, a pane index) gets
// its own reproducible generator regardless of when it is first touched.
// Distributions are implemented directly on the raw 64-bit stream to keep
// results identical across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t key, std::uint64_t salt) {
  std::uint64_t s = key ^ (salt + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2));
  return splitmix64(s);
}

inline std::uint64_t hash_site(const Site& s) {
  std::uint64_t k = 0x6a09e667f3bcc909ull;
  for (Coord c : s) k = mix_key(k, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  return k;
}

inline std::uint64_t hash_cycle(const Cycle& c) {
  std::uint64_t k = 0xbb67ae8584caa73bull;
  for (const Site& s : c.sites) k = mix_key(k, hash_site(s));
  return k;
}

class RngStream {
 public:
  RngStream() : RngStream(0) {}

  explicit RngStream(std::uint64_t key) {
    std::uint64_t s = key;
    for (int i = 0; i < 4; ++i) state_[i] = splitmix64(s);
    if (!(state_[0] | state_[1] | state_[2] | state_[3])) state_[0] = 1;
  }

  RngStream(std::uint64_t key, std::initializer_list<std::uint64_t> salts) {
    std::uint64_t k = key;
    for (std::uint64_t s : salts) k = mix_key(k, s);
    *this = RngStream(k);
  }

  // xoshiro256++
  std::uint64_t next() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0,1]; never returns 0 so log() is always safe.
  double u01() {
    std::uint64_t bits = next() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double exponential() { return -std::log(u01()); }

  double exponential(double rate) { return -std::log(u01()) / rate; }

  // Exponential conditioned on being <= cap (inverse CDF).
  double truncated_exponential(double cap) {
    double u = u01();
    return -std::log1p(-u * (1.0 - std::exp(-cap)));
  }

  // Knuth product method; fine for the small means used here.
  std::uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 700.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double prod = u01();
      while (prod > limit) {
        ++k;
        prod *= u01();
      }
      return k;
    }
    // Split large means; keeps the loop bounded without a new algorithm.
    return poisson(mean * 0.5) + poisson(mean - mean * 0.5);
  }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny versus 2^64.
    return next() % n;
  }

 private:
  std::uint64_t state_[4];
};

// Key derivation helper for named streams.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> salts) {
  std::uint64_t k = seed;
  for (std::uint64_t s : salts) k = mix_key(k, s);
  return k;
}

}  // namespace cyclegas

#endif
