#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "dla/errors.hpp"

namespace dla {

// Growing cluster state: member set, outer boundary (non-members adjacent to
// a member), radius seen from the root, and particle count. The boundary and
// radius are maintained incrementally on attach; audit() recomputes both from
// scratch and throws on any mismatch.
template <class G>
class Aggregate {
 public:
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;
  using Set = std::unordered_set<V, H>;

  // step_counter restores t after a checkpoint resume (seed then holds the
  // full member list in insertion order).
  Aggregate(const G& g, std::vector<V> seed, int64_t step_counter = 0)
      : g_(&g), t_(step_counter) {
    if (seed.empty()) throw DomainError("aggregate seed must be non-empty");
    if (step_counter < 0) throw DomainError("step counter must be >= 0");
    for (const V& v : seed) {
      if (!g.contains(v))
        throw DomainError("aggregate seed vertex not in graph");
      if (!members_.insert(v).second)
        throw DomainError("aggregate seed has duplicate vertices");
      order_.push_back(v);
    }
    if (!members_.count(g.root()))
      throw DomainError("aggregate seed must contain the root");
    check_connected(seed);
    for (const V& v : seed) {
      radius_ = std::max(radius_, g.dist_to_root(v));
      g.for_each_neighbor(v, [&](const V& w) {
        if (!members_.count(w)) boundary_.insert(w);
      });
    }
  }

  const G& graph() const { return *g_; }
  bool is_member(const V& v) const { return members_.count(v) != 0; }
  bool is_boundary(const V& v) const { return boundary_.count(v) != 0; }
  const Set& members() const { return members_; }
  const Set& boundary() const { return boundary_; }
  const std::vector<V>& order() const { return order_; }
  int64_t size() const { return static_cast<int64_t>(members_.size()); }
  int64_t t() const { return t_; }
  int64_t radius() const { return radius_; }

  std::vector<V> boundary_sorted() const {
    std::vector<V> out(boundary_.begin(), boundary_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<V> members_sorted() const {
    std::vector<V> out(order_);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Attach one particle at a current boundary vertex.
  void attach(const V& v) {
    if (!boundary_.count(v))
      throw DomainError("attach target is not a boundary vertex");
    boundary_.erase(v);
    members_.insert(v);
    order_.push_back(v);
    radius_ = std::max(radius_, g_->dist_to_root(v));
    g_->for_each_neighbor(v, [&](const V& w) {
      if (!members_.count(w)) boundary_.insert(w);
    });
    ++t_;
  }

  // Recompute boundary and radius from the member set; throws on drift.
  void audit() const {
    Set fresh;
    int64_t rad = 0;
    for (const V& v : members_) {
      rad = std::max(rad, g_->dist_to_root(v));
      g_->for_each_neighbor(v, [&](const V& w) {
        if (!members_.count(w)) fresh.insert(w);
      });
    }
    if (rad != radius_)
      throw Error(ErrorKind::Runtime,
                  "aggregate audit failed: radius " + std::to_string(radius_) +
                      " vs recomputed " + std::to_string(rad));
    if (fresh.size() != boundary_.size())
      throw Error(ErrorKind::Runtime,
                  "aggregate audit failed: boundary size " +
                      std::to_string(boundary_.size()) + " vs recomputed " +
                      std::to_string(fresh.size()));
    for (const V& v : fresh)
      if (!boundary_.count(v))
        throw Error(ErrorKind::Runtime,
                    "aggregate audit failed: boundary content mismatch");
  }

 private:
  void check_connected(const std::vector<V>& seed) const {
    Set seen;
    std::queue<V> q;
    q.push(seed.front());
    seen.insert(seed.front());
    while (!q.empty()) {
      V v = q.front();
      q.pop();
      g_->for_each_neighbor(v, [&](const V& w) {
        if (members_.count(w) && seen.insert(w).second) q.push(w);
      });
    }
    if (seen.size() != members_.size())
      throw DomainError("aggregate seed must be connected");
  }

  const G* g_;
  Set members_, boundary_;
  std::vector<V> order_;
  int64_t radius_ = 0;
  int64_t t_ = 0;
};

}  // namespace dla
