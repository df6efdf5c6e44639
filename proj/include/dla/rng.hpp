#pragma once

#include <cstdint>

namespace dla {

// 64-bit avalanche finalizer (splitmix64 / murmur3 style).
constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// Counter-based generator: the i-th output is mix64(seed + i*gamma), a pure
// function of (seed, i). State is two words, streams never collide for
// distinct seeds in practice, and a generator can be resumed exactly by
// restoring its counter. All randomness in the workbench flows through this
// type; std:: distributions are avoided because their output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), ctr_(0) {}

  uint64_t next() { return mix64(seed_ + (++ctr_) * kGoldenGamma); }

  // Unbiased uniform integer in [0, n). Multiply-shift with rejection.
  uint64_t below(uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t thresh = (0 - n) % n;
      while (lo < thresh) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Unbiased uniform integer in [0, n) for 128-bit n.
  unsigned __int128 below128(unsigned __int128 n) {
    if (n <= 1) return 0;
    // Rejection from the smallest power-of-two range covering n.
    int bits = 0;
    for (unsigned __int128 v = n - 1; v != 0; v >>= 1) ++bits;
    for (;;) {
      unsigned __int128 r = next();
      if (bits > 64) r = (r << 64) | next();
      if (bits < 128) r &= ((static_cast<unsigned __int128>(1) << bits) - 1);
      if (r < n) return r;
    }
  }

  // Uniform double in [0,1) with 53 random bits.
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  uint64_t counter() const { return ctr_; }
  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t ctr_;
};

// Child-stream derivation: child(seed, label) re-mixes the label into the
// seed. Reproducibility contract: every consumer of randomness derives its
// own stream from the master seed via purpose tags and *item indices* (walk
// number, attempt number, step number) — never via shared mutable state or
// execution order — so results are bit-identical for any worker count.
constexpr uint64_t split_seed(uint64_t seed, uint64_t label) {
  return mix64(seed ^ mix64(label + kGoldenGamma));
}

struct Stream {
  uint64_t seed = 0;
  Stream sub(uint64_t label) const { return Stream{split_seed(seed, label)}; }
  Stream sub(uint64_t a, uint64_t b) const { return sub(a).sub(b); }
  Stream sub(uint64_t a, uint64_t b, uint64_t c) const {
    return sub(a).sub(b).sub(c);
  }
  Rng rng() const { return Rng(seed); }
};

// Purpose tags for stream derivation (stable across versions).
namespace tag {
inline constexpr uint64_t kAttachment = 1;   // DLA attachment attempts
inline constexpr uint64_t kGreenWalk = 2;    // Green's function estimator
inline constexpr uint64_t kPercField = 3;    // percolation site field
inline constexpr uint64_t kPercAttempt = 4;  // percolation resampling
inline constexpr uint64_t kRandomSet = 5;    // random connected test sets
inline constexpr uint64_t kWalkTest = 6;     // ad-hoc walk experiments
}  // namespace tag

}  // namespace dla
