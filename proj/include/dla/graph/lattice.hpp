#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dla/coords.hpp"
#include "dla/errors.hpp"

namespace dla {

// Z^d with nearest-neighbour edges. Vertices are integer coordinate vectors;
// graph distance equals the L1 metric.
class Lattice {
 public:
  using vertex_type = Coords;
  using vertex_hash = CoordsHash;

  explicit Lattice(int d) : d_(d) {
    if (d < 1 || d > kMaxDims)
      throw ConfigError("lattice dimension must be in [1," +
                        std::to_string(kMaxDims) + "], got " +
                        std::to_string(d));
  }

  int dims() const { return d_; }
  vertex_type root() const { return origin_coords(); }
  int degree(const vertex_type&) const { return 2 * d_; }
  int max_degree() const { return 2 * d_; }
  // Simple random walk is transient exactly when d >= 3; lower dimensions are
  // constructible for exploration but excluded from potential-theory claims.
  bool transient() const { return d_ >= 3; }
  std::string family_tag() const { return "z" + std::to_string(d_); }

  template <class F>
  void for_each_neighbor(const vertex_type& v, F&& f) const {
    for (int i = 0; i < d_; ++i) {
      vertex_type w = v;
      w[i] += 1;
      f(w);
      w[i] -= 2;
      f(w);
    }
  }

  std::vector<vertex_type> neighbors(const vertex_type& v) const {
    std::vector<vertex_type> out;
    out.reserve(2 * d_);
    for_each_neighbor(v, [&](const vertex_type& w) { out.push_back(w); });
    return out;
  }

  int64_t dist_to_root(const vertex_type& v) const { return l1_norm(v, d_); }
  int64_t dist(const vertex_type& a, const vertex_type& b) const {
    return l1_dist(a, b, d_);
  }

  bool contains(const vertex_type& v) const {
    for (int i = d_; i < kMaxDims; ++i)
      if (v[i] != 0) return false;
    return true;
  }

  // |{x : |x|_1 <= r}| = sum_i 2^i C(d,i) C(r,i).
  uint64_t ball_size(int64_t r) const {
    if (r < 0) throw DomainError("ball radius must be non-negative");
    unsigned __int128 total = 0;
    for (int i = 0; i <= d_; ++i) {
      unsigned __int128 term = 1;
      for (int j = 0; j < i; ++j) term *= 2;
      // C(d,i)
      unsigned __int128 cdi = 1;
      for (int j = 0; j < i; ++j) cdi = cdi * (d_ - j) / (j + 1);
      // C(r,i)
      unsigned __int128 cri = 1;
      bool overflow = false;
      for (int j = 0; j < i; ++j) {
        if (r - j <= 0) {
          cri = 0;
          break;
        }
        unsigned __int128 next = cri * static_cast<uint64_t>(r - j);
        if (next / static_cast<uint64_t>(r - j) != cri) {
          overflow = true;
          break;
        }
        cri = next / static_cast<uint64_t>(j + 1);
      }
      if (overflow) throw ResourceError("ball size overflows 128 bits");
      total += term * cdi * cri;
      if (total >> 64)
        throw ResourceError("ball size exceeds 2^64 at radius " +
                            std::to_string(r));
    }
    return static_cast<uint64_t>(total);
  }

 private:
  int d_;
};

}  // namespace dla
