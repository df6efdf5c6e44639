#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dla/coords.hpp"
#include "dla/errors.hpp"

namespace dla {

// Infinite k-regular tree. Vertices are paths from the root encoded as byte
// strings: the root is the empty word; its k children append branches
// 0..k-1; every deeper vertex has its parent plus k-1 children appending
// branches 0..k-2. Every vertex therefore has degree exactly k.
class RegularTree {
 public:
  using vertex_type = Word;
  using vertex_hash = WordHash;

  explicit RegularTree(int k) : k_(k) {
    if (k < 3)
      throw ConfigError("regular tree branching must be >= 3 (k=2 is the "
                        "recurrent line), got " +
                        std::to_string(k));
  }

  int branching() const { return k_; }
  vertex_type root() const { return Word{}; }
  int degree(const vertex_type&) const { return k_; }
  int max_degree() const { return k_; }
  bool transient() const { return true; }
  std::string family_tag() const { return "tree" + std::to_string(k_); }

  int child_count(const vertex_type& v) const {
    return v.empty() ? k_ : k_ - 1;
  }

  vertex_type child(const vertex_type& v, int branch) const {
    vertex_type w = v;
    w.push_back(static_cast<char>(branch));
    return w;
  }

  vertex_type parent(const vertex_type& v) const {
    if (v.empty()) throw DomainError("root has no parent");
    return v.substr(0, v.size() - 1);
  }

  // Neighbour order: children by branch index, then the parent (if any).
  template <class F>
  void for_each_neighbor(const vertex_type& v, F&& f) const {
    int c = child_count(v);
    for (int b = 0; b < c; ++b) f(child(v, b));
    if (!v.empty()) f(parent(v));
  }

  std::vector<vertex_type> neighbors(const vertex_type& v) const {
    std::vector<vertex_type> out;
    out.reserve(k_);
    for_each_neighbor(v, [&](const vertex_type& w) { out.push_back(w); });
    return out;
  }

  int64_t dist_to_root(const vertex_type& v) const {
    return static_cast<int64_t>(v.size());
  }

  int64_t dist(const vertex_type& a, const vertex_type& b) const {
    size_t lcp = 0;
    while (lcp < a.size() && lcp < b.size() && a[lcp] == b[lcp]) ++lcp;
    return static_cast<int64_t>(a.size() + b.size() - 2 * lcp);
  }

  bool contains(const vertex_type& v) const {
    for (size_t i = 0; i < v.size(); ++i) {
      int limit = (i == 0) ? k_ : k_ - 1;
      auto b = static_cast<unsigned char>(v[i]);
      if (b >= static_cast<unsigned>(limit)) return false;
    }
    return true;
  }

  // 1 + k * ((k-1)^r - 1) / (k-2).
  uint64_t ball_size(int64_t r) const {
    if (r < 0) throw DomainError("ball radius must be non-negative");
    unsigned __int128 total = 1, layer = 1;
    for (int64_t i = 1; i <= r; ++i) {
      layer *= (i == 1) ? k_ : (k_ - 1);
      total += layer;
      if (total >> 64)
        throw ResourceError("ball size exceeds 2^64 at radius " +
                            std::to_string(r));
    }
    return static_cast<uint64_t>(total);
  }

 private:
  int k_;
};

}  // namespace dla
