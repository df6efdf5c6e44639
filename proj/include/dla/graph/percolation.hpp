#pragma once

#include <cstdint>
#include <cstdio>
#include <queue>
#include <string>
#include <vector>

#include "dla/coords.hpp"
#include "dla/errors.hpp"
#include "dla/rng.hpp"

namespace dla {

// Supercritical site-percolation cluster of the origin inside the finite box
// [-R, R]^d. Sites are open independently with probability p, decided by a
// counter-based hash of (seed, coordinates), so the environment is a pure
// function of the seed. The graph is the open component containing the
// origin; environments are resampled (with derived seeds) until that
// component reaches the box boundary. This is a finite surrogate of the
// infinite cluster: degrees and distances are exact for the induced subgraph,
// but quantities near the box faces feel the truncation.
class PercolationCluster {
 public:
  using vertex_type = Coords;
  using vertex_hash = CoordsHash;

  PercolationCluster(int d, double p, int box_radius, uint64_t seed,
                     int max_attempts = 1024)
      : d_(d), p_(p), box_(box_radius), master_seed_(seed) {
    if (d < 3 || d > kMaxDims)
      throw ConfigError("percolation dimension must be in [3," +
                        std::to_string(kMaxDims) + "]");
    double pc = critical_threshold(d);
    if (!(p > pc) || p > 1.0)
      throw ConfigError("percolation must be supercritical: need p in (" +
                        std::to_string(pc) + ", 1], got " + std::to_string(p));
    if (box_radius < 4) throw ConfigError("percolation box radius must be >= 4");
    side_ = 2 * static_cast<int64_t>(box_) + 1;
    uint64_t cells = 1;
    for (int i = 0; i < d_; ++i) {
      cells *= static_cast<uint64_t>(side_);
      if (cells > (1ull << 24))
        throw ResourceError("percolation box exceeds 2^24 cells");
    }
    cells_ = cells;

    Stream master{master_seed_};
    for (attempts_used_ = 1; attempts_used_ <= max_attempts; ++attempts_used_) {
      field_seed_ =
          master.sub(tag::kPercField, static_cast<uint64_t>(attempts_used_))
              .seed;
      if (build_cluster()) return;
    }
    throw ConstructionError(
        "no spanning percolation cluster found in " +
        std::to_string(max_attempts) + " attempts (d=" + std::to_string(d_) +
        ", p=" + std::to_string(p_) + ", box=" + std::to_string(box_) + ")");
  }

  int dims() const { return d_; }
  double p() const { return p_; }
  int box_radius() const { return box_; }
  uint64_t seed() const { return master_seed_; }
  int attempts_used() const { return attempts_used_; }
  uint64_t cluster_size() const { return members_.size(); }
  double open_density() const { return open_density_; }

  // Best-known numerical critical thresholds for site percolation on Z^d.
  static double critical_threshold(int d) {
    switch (d) {
      case 3: return 0.3116077;
      case 4: return 0.1968861;
      case 5: return 0.1407966;
      case 6: return 0.1090117;
      case 7: return 0.0889511;
      case 8: return 0.0752101;
      default:
        throw ConfigError("no critical threshold tabulated for d=" +
                          std::to_string(d));
    }
  }

  vertex_type root() const { return origin_coords(); }

  bool site_open(const vertex_type& v) const {
    uint64_t h = field_seed_;
    for (int i = 0; i < d_; ++i)
      h = mix64(h ^ (static_cast<uint64_t>(static_cast<uint32_t>(v[i])) +
                     (static_cast<uint64_t>(i) + 1) * kGoldenGamma));
    return static_cast<double>(h) * 0x1.0p-64 < p_;
  }

  bool in_box(const vertex_type& v) const {
    for (int i = 0; i < d_; ++i)
      if (v[i] < -box_ || v[i] > box_) return false;
    for (int i = d_; i < kMaxDims; ++i)
      if (v[i] != 0) return false;
    return true;
  }

  bool contains(const vertex_type& v) const {
    return in_box(v) && dist_[cell_index(v)] >= 0;
  }

  template <class F>
  void for_each_neighbor(const vertex_type& v, F&& f) const {
    for (int i = 0; i < d_; ++i) {
      vertex_type w = v;
      w[i] += 1;
      if (contains(w)) f(w);
      w[i] -= 2;
      if (contains(w)) f(w);
    }
  }

  std::vector<vertex_type> neighbors(const vertex_type& v) const {
    std::vector<vertex_type> out;
    for_each_neighbor(v, [&](const vertex_type& w) { out.push_back(w); });
    return out;
  }

  int degree(const vertex_type& v) const {
    int d = 0;
    for_each_neighbor(v, [&](const vertex_type&) { ++d; });
    return d;
  }

  int max_degree() const { return 2 * d_; }
  bool transient() const { return true; }
  std::string family_tag() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "perc:%d:%g:%d:%llu", d_, p_, box_,
                  static_cast<unsigned long long>(master_seed_));
    return buf;
  }

  int64_t dist_to_root(const vertex_type& v) const {
    if (!in_box(v)) throw DomainError("vertex outside percolation box");
    int32_t d = dist_[cell_index(v)];
    if (d < 0) throw DomainError("vertex not in percolation cluster");
    return d;
  }

  int64_t dist(const vertex_type& a, const vertex_type& b) const {
    if (a == b) return 0;
    std::vector<int32_t> dd(cells_, -1);
    std::queue<vertex_type> q;
    dd[cell_index(a)] = 0;
    q.push(a);
    while (!q.empty()) {
      vertex_type v = q.front();
      q.pop();
      int32_t dv = dd[cell_index(v)];
      int64_t hit = -1;
      for_each_neighbor(v, [&](const vertex_type& w) {
        if (hit >= 0) return;
        if (w == b) {
          hit = dv + 1;
          return;
        }
        auto& slot = dd[cell_index(w)];
        if (slot < 0) {
          slot = dv + 1;
          q.push(w);
        }
      });
      if (hit >= 0) return hit;
    }
    throw DomainError("percolation distance: vertices not connected");
  }

  int64_t max_dist() const { return static_cast<int64_t>(shells_.size()) - 1; }

  const std::vector<vertex_type>& shell(int64_t r) const {
    static const std::vector<vertex_type> kEmptyShell;
    if (r < 0) throw DomainError("shell radius must be non-negative");
    if (r >= static_cast<int64_t>(shells_.size())) return kEmptyShell;
    return shells_[static_cast<size_t>(r)];
  }

  uint64_t ball_size(int64_t r) const {
    if (r < 0) throw DomainError("ball radius must be non-negative");
    if (r >= static_cast<int64_t>(ball_prefix_.size()))
      return ball_prefix_.empty() ? 0 : ball_prefix_.back();
    return ball_prefix_[static_cast<size_t>(r)];
  }

  const std::vector<vertex_type>& members() const { return members_; }

 private:
  size_t cell_index(const vertex_type& v) const {
    size_t idx = 0;
    for (int i = 0; i < d_; ++i)
      idx = idx * static_cast<size_t>(side_) +
            static_cast<size_t>(v[i] + box_);
    return idx;
  }

  bool build_cluster() {
    dist_.assign(cells_, -1);
    members_.clear();
    shells_.clear();
    ball_prefix_.clear();

    uint64_t open_count = 0;
    // Open density over the whole box, for environment sanity checks.
    {
      vertex_type v{};
      for (int i = 0; i < d_; ++i) v[i] = -box_;
      for (;;) {
        if (site_open(v)) ++open_count;
        int i = 0;
        while (i < d_ && v[i] == box_) v[i++] = -box_;
        if (i == d_) break;
        ++v[i];
      }
    }
    open_density_ = static_cast<double>(open_count) / static_cast<double>(cells_);

    if (!site_open(root())) return false;
    std::vector<vertex_type> frontier{root()}, next;
    dist_[cell_index(root())] = 0;
    bool touches = false;
    int32_t level = 0;
    while (!frontier.empty()) {
      shells_.push_back(frontier);
      for (const auto& v : frontier) {
        members_.push_back(v);
        for (int i = 0; i < d_; ++i)
          if (v[i] == box_ || v[i] == -box_) touches = true;
        for (int a = 0; a < d_; ++a) {
          for (int s = -1; s <= 1; s += 2) {
            vertex_type w = v;
            w[a] += s;
            if (!in_box(w)) continue;
            auto& slot = dist_[cell_index(w)];
            if (slot >= 0) continue;
            if (!site_open(w)) continue;
            slot = level + 1;
            next.push_back(w);
          }
        }
      }
      frontier = std::move(next);
      next.clear();
      ++level;
    }
    ball_prefix_.resize(shells_.size());
    uint64_t acc = 0;
    for (size_t r = 0; r < shells_.size(); ++r) {
      acc += shells_[r].size();
      ball_prefix_[r] = acc;
    }
    return touches;
  }

  int d_;
  double p_;
  int box_;
  uint64_t master_seed_ = 0, field_seed_ = 0;
  int64_t side_ = 0;
  uint64_t cells_ = 0;
  int attempts_used_ = 0;
  double open_density_ = 0.0;
  std::vector<int32_t> dist_;
  std::vector<vertex_type> members_;
  std::vector<std::vector<vertex_type>> shells_;
  std::vector<uint64_t> ball_prefix_;
};

}  // namespace dla
