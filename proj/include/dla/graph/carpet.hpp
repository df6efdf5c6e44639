#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "dla/coords.hpp"
#include "dla/errors.hpp"

namespace dla {

// First-orthant pre-fractal carpet in n dimensions: a cell with non-negative
// coordinates is removed iff at some base-3 digit position every coordinate
// has digit 1. Edges are face adjacencies (+-e_i) between retained cells.
// Graph distance to the origin equals the L1 norm: from any retained cell,
// decreasing any positive coordinate keeps every base-3 digit test satisfied
// along a monotone staircase path (property-tested against BFS).
class PreSierpinskiCarpet {
 public:
  using vertex_type = Coords;
  using vertex_hash = CoordsHash;

  explicit PreSierpinskiCarpet(int n) : n_(n) {
    if (n < 2 || n > kMaxDims)
      throw ConfigError("carpet dimension must be in [2," +
                        std::to_string(kMaxDims) + "], got " +
                        std::to_string(n));
  }

  int dims() const { return n_; }
  vertex_type root() const { return origin_coords(); }

  static bool cell_retained(int n, const Coords& c) {
    for (int i = 0; i < n; ++i)
      if (c[i] < 0) return false;
    Coords q = c;
    for (;;) {
      bool any = false, all_one = true;
      for (int i = 0; i < n; ++i) {
        if (q[i] > 0) any = true;
        if (q[i] % 3 != 1) all_one = false;
      }
      if (!any) return true;
      if (all_one) return false;
      for (int i = 0; i < n; ++i) q[i] /= 3;
    }
  }

  bool contains(const vertex_type& v) const {
    for (int i = n_; i < kMaxDims; ++i)
      if (v[i] != 0) return false;
    return cell_retained(n_, v);
  }

  template <class F>
  void for_each_neighbor(const vertex_type& v, F&& f) const {
    for (int i = 0; i < n_; ++i) {
      vertex_type w = v;
      w[i] += 1;
      if (cell_retained(n_, w)) f(w);
      w[i] -= 2;
      if (w[i] >= 0 && cell_retained(n_, w)) f(w);
    }
  }

  std::vector<vertex_type> neighbors(const vertex_type& v) const {
    std::vector<vertex_type> out;
    out.reserve(2 * n_);
    for_each_neighbor(v, [&](const vertex_type& w) { out.push_back(w); });
    return out;
  }

  int degree(const vertex_type& v) const {
    int d = 0;
    for_each_neighbor(v, [&](const vertex_type&) { ++d; });
    return d;
  }

  int max_degree() const { return 2 * n_; }
  // The walk dimension / spectral data make n=2 recurrent; it stays
  // constructible for exploration but is excluded from transience claims.
  bool transient() const { return n_ >= 3; }
  std::string family_tag() const { return "carpet" + std::to_string(n_); }

  int64_t dist_to_root(const vertex_type& v) const { return l1_norm(v, n_); }

  int64_t dist(const vertex_type& a, const vertex_type& b) const {
    if (a == b) return 0;
    // BFS; cells are few near the regions these queries touch.
    std::unordered_map<Coords, int64_t, CoordsHash> seen;
    std::queue<Coords> q;
    seen[a] = 0;
    q.push(a);
    while (!q.empty()) {
      Coords v = q.front();
      q.pop();
      int64_t dv = seen[v];
      int64_t found = -1;
      for_each_neighbor(v, [&](const Coords& w) {
        if (found >= 0) return;
        if (w == b) {
          found = dv + 1;
          return;
        }
        if (seen.emplace(w, dv + 1).second) q.push(w);
      });
      if (found >= 0) return found;
      if (seen.size() > 50'000'000)
        throw ResourceError("carpet distance BFS exceeded vertex budget");
    }
    throw DomainError("carpet distance: vertices not connected");
  }

  uint64_t ball_size(int64_t r) const {
    if (r < 0) throw DomainError("ball radius must be non-negative");
    std::unordered_map<Coords, int64_t, CoordsHash> seen;
    std::queue<Coords> q;
    seen[root()] = 0;
    q.push(root());
    uint64_t count = 0;
    while (!q.empty()) {
      Coords v = q.front();
      q.pop();
      ++count;
      int64_t dv = seen[v];
      if (dv == r) continue;
      for_each_neighbor(v, [&](const Coords& w) {
        if (seen.emplace(w, dv + 1).second) q.push(w);
      });
      if (seen.size() > 100'000'000)
        throw ResourceError("carpet ball BFS exceeded vertex budget");
    }
    return count;
  }

 private:
  int n_;
};

}  // namespace dla
