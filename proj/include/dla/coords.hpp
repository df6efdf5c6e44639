#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "dla/rng.hpp"

namespace dla {

inline constexpr int kMaxDims = 8;

// Integer coordinate vector; families with d < kMaxDims leave trailing
// entries zero so equality/hashing work uniformly.
using Coords = std::array<int32_t, kMaxDims>;

constexpr Coords origin_coords() { return Coords{}; }

inline Coords unit_coords(int axis, int32_t v = 1) {
  Coords c{};
  c[axis] = v;
  return c;
}

inline int64_t l1_norm(const Coords& c, int dims) {
  int64_t s = 0;
  for (int i = 0; i < dims; ++i) s += std::abs(static_cast<int64_t>(c[i]));
  return s;
}

inline int64_t l1_dist(const Coords& a, const Coords& b, int dims) {
  int64_t s = 0;
  for (int i = 0; i < dims; ++i)
    s += std::abs(static_cast<int64_t>(a[i]) - static_cast<int64_t>(b[i]));
  return s;
}

struct CoordsHash {
  size_t operator()(const Coords& c) const {
    uint64_t h = 0x51ab2ef1906c57d3ull;
    for (int i = 0; i < kMaxDims; ++i)
      h = mix64(h ^ (static_cast<uint64_t>(static_cast<uint32_t>(c[i])) +
                     kGoldenGamma));
    return static_cast<size_t>(h);
  }
};

inline std::string coords_to_string(const Coords& c, int dims) {
  std::string s = "(";
  for (int i = 0; i < dims; ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  s += ")";
  return s;
}

// Tree vertices are root paths ("words"): byte i holds the child branch taken
// at depth i. The empty word is the root.
using Word = std::string;

struct WordHash {
  size_t operator()(const Word& w) const {
    return std::hash<std::string>{}(w);
  }
};

std::string inline word_to_string(const Word& w) {
  if (w.empty()) return "o";
  std::string s;
  for (unsigned char c : w) s += std::to_string(static_cast<int>(c));
  return s;
}

}  // namespace dla
