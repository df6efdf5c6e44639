#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dla/coords.hpp"
#include "dla/errors.hpp"
#include "dla/flat_set.hpp"
#include "dla/graph/lattice.hpp"
#include "dla/graph/percolation.hpp"
#include "dla/graph/tree.hpp"
#include "dla/potential/walk.hpp"
#include "dla/rng.hpp"
#include "dla/sim/aggregate.hpp"
#include "dla/workers.hpp"

namespace dla {

struct LaunchConfig {
  // Walkers start uniformly on the sphere of radius
  // ceil(launch_factor * rad) + launch_offset and are discarded once they
  // pass ceil(escape_factor * (rad + launch_offset)). The escape surrogate
  // changes the exact attachment law by a truncation the sphere-doubling
  // check quantifies.
  double launch_factor = 2.0;
  int64_t launch_offset = 5;
  double escape_factor = 4.0;
  int64_t max_attempts = 10'000'000;    // per attachment
  int64_t step_budget = 2'000'000'000;  // per walk attempt
  int workers = 1;
  bool force_walk_sampler = false;  // disable the exact tree shortcut

  void validate() const {
    if (!(launch_factor >= 2.0))
      throw ConfigError("launch_factor must be >= 2");
    if (launch_offset < 2) throw ConfigError("launch_offset must be >= 2");
    if (!(escape_factor > launch_factor))
      throw ConfigError("escape_factor must exceed launch_factor");
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (step_budget < 1) throw ConfigError("step_budget must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
  }

  int64_t launch_radius(int64_t rad) const {
    return static_cast<int64_t>(std::ceil(launch_factor * static_cast<double>(rad))) +
           launch_offset;
  }
  int64_t escape_radius(int64_t rad) const {
    return static_cast<int64_t>(
        std::ceil(escape_factor * static_cast<double>(rad + launch_offset)));
  }
};

// Exact uniform sampling on the L1 sphere {|x|_1 = R} of Z^d: coordinates are
// drawn sequentially, weighted by the number of completions in the remaining
// dimensions (S_j(m) = #{x in Z^j : |x|_1 = m}).
class LatticeSphereSampler {
 public:
  LatticeSphereSampler(int d, int64_t radius) : d_(d), radius_(radius) {
    if (radius < 1) throw DomainError("sphere radius must be >= 1");
    counts_.assign(static_cast<size_t>(d + 1),
                   std::vector<unsigned __int128>(radius_ + 1, 0));
    counts_[0][0] = 1;
    for (int j = 1; j <= d; ++j)
      for (int64_t m = 0; m <= radius_; ++m) {
        unsigned __int128 s = counts_[j - 1][m];
        for (int64_t b = 0; b < m; ++b) s += 2 * counts_[j - 1][b];
        counts_[j][m] = s;
      }
  }

  Coords sample(Rng& rng) const {
    Coords out{};
    int64_t rem = radius_;
    for (int i = 0; i < d_; ++i) {
      int j = d_ - 1 - i;  // dimensions still to fill
      unsigned __int128 u = rng.below128(counts_[j + 1][rem]);
      int64_t chosen = 0;
      unsigned __int128 cum = 0;
      for (int64_t a = -rem;; ++a) {
        cum += counts_[j][rem - std::abs(a)];
        if (u < cum) {
          chosen = a;
          break;
        }
      }
      out[i] = static_cast<int32_t>(chosen);
      rem -= std::abs(chosen);
    }
    return out;
  }

  int64_t radius() const { return radius_; }

 private:
  int d_;
  int64_t radius_;
  std::vector<std::vector<unsigned __int128>> counts_;
};

// Graph-metric sphere cache built by layered BFS from the root. Valid for
// bipartite families (subgraphs of Z^d): a neighbour of layer r lies in layer
// r-1 or r+1, so deduplication needs only the previous layer. Layers are kept
// sorted, making launch draws independent of construction history.
template <class G>
class ShellCache {
 public:
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;

  explicit ShellCache(const G& g) : g_(&g) { reset(); }

  const std::vector<V>& sphere(int64_t r) {
    if (r < 0) throw DomainError("sphere radius must be >= 0");
    if (r < r_) reset();
    while (r_ < r) advance();
    return cur_;
  }

 private:
  void reset() {
    cur_ = {g_->root()};
    prev_set_.clear();
    r_ = 0;
  }

  void advance() {
    std::unordered_set<V, H> next_set;
    for (const V& v : cur_)
      g_->for_each_neighbor(v, [&](const V& w) {
        if (!prev_set_.count(w)) next_set.insert(w);
      });
    prev_set_.clear();
    for (const V& v : cur_) prev_set_.insert(v);
    cur_.assign(next_set.begin(), next_set.end());
    std::sort(cur_.begin(), cur_.end());
    ++r_;
  }

  const G* g_;
  std::vector<V> cur_;
  std::unordered_set<V, H> prev_set_;
  int64_t r_ = 0;
};

struct StepInfo {
  int64_t attempts = 0;  // walk attempts used for this attachment
  int64_t steps = 0;     // steps of the accepted walk
};

// DLA driver: repeatedly launches walkers from the launch sphere and attaches
// them where they first hit the aggregate's closure (members + boundary).
// Attempt i of step t draws every bit of randomness from the stream
// (seed, attachment, t, i) and the accepted attempt is the lowest-indexed
// hitting one, so results are identical for any worker count. On regular
// trees the attachment law is exactly uniform on the boundary (the
// equilibrium measure of A union dA restricted to dA is constant), so the
// engine uses a direct uniform draw unless force_walk_sampler is set.
template <class G>
class Engine {
 public:
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;

  static constexpr bool kIsTree = std::is_same_v<G, RegularTree>;
  static constexpr bool kIsLattice = std::is_same_v<G, Lattice>;
  static constexpr bool kIsPerc = std::is_same_v<G, PercolationCluster>;
  static constexpr bool kCoordsVertex = std::is_same_v<V, Coords>;

  Engine(const G& g, Aggregate<G> agg, LaunchConfig cfg, uint64_t master_seed)
      : g_(&g), agg_(std::move(agg)), cfg_(cfg), master_{master_seed} {
    cfg_.validate();
    if (&agg_.graph() != g_)
      throw ConfigError("aggregate was built for a different graph");
    if constexpr (kIsTree) rebuild_tree_boundary();
    if constexpr (kCoordsVertex) rebuild_sticky();
  }

  const Aggregate<G>& aggregate() const { return agg_; }
  const LaunchConfig& config() const { return cfg_; }
  uint64_t master_seed() const { return master_.seed; }

  // One attachment; audits the incremental state at t = 1, 2, 4, 8, ...
  std::pair<V, StepInfo> step() {
    const int64_t t = agg_.t();
    std::pair<V, StepInfo> out = sample_attachment(t);
    apply_attach(out.first);
    const int64_t tn = agg_.t();
    if ((tn & (tn - 1)) == 0) agg_.audit();
    return out;
  }

  template <class RecordFn>
  void run(int64_t particles, RecordFn&& record) {
    for (int64_t i = 0; i < particles; ++i) {
      auto [v, info] = step();
      record(agg_.t(), agg_.radius(), v, info);
    }
  }

  // Samples where particle number step_index (0-based) attaches. Pure w.r.t.
  // the aggregate: does not modify state.
  std::pair<V, StepInfo> sample_attachment(int64_t step_index) {
    if constexpr (kIsTree) {
      if (!cfg_.force_walk_sampler) {
        Rng rng = master_.sub(tag::kAttachment,
                              static_cast<uint64_t>(step_index), 0)
                      .rng();
        V v = tree_boundary_[rng.below(tree_boundary_.size())];
        return {v, StepInfo{1, 0}};
      }
    }
    return walk_attachment(step_index);
  }

 private:
  // ---- shared attach bookkeeping ----------------------------------------

  void apply_attach(const V& v) {
    std::vector<V> fresh;
    g_->for_each_neighbor(v, [&](const V& w) {
      if (!agg_.is_member(w) && !agg_.is_boundary(w)) fresh.push_back(w);
    });
    agg_.attach(v);
    if constexpr (kIsTree) {
      auto it = tree_pos_.find(v);
      if (it != tree_pos_.end()) {
        size_t pos = it->second;
        tree_pos_.erase(it);
        if (pos + 1 != tree_boundary_.size()) {
          tree_boundary_[pos] = tree_boundary_.back();
          tree_pos_[tree_boundary_[pos]] = pos;
        }
        tree_boundary_.pop_back();
      }
      for (const V& w : fresh) {
        tree_pos_[w] = tree_boundary_.size();
        tree_boundary_.push_back(w);
      }
    }
    if constexpr (kCoordsVertex) {
      if (packable_) {
        for (const V& w : fresh) sticky_.insert(pack(w));
        // v itself was already present as a boundary vertex.
      }
    }
  }

  // ---- tree fast path -----------------------------------------------------

  // Replays the aggregate's insertion order, so the boundary list (and thus
  // the uniform draw) is a pure function of history — identical after a
  // checkpoint resume.
  void rebuild_tree_boundary() {
    if constexpr (kIsTree) {
      tree_boundary_.clear();
      tree_pos_.clear();
      std::unordered_set<V, H> members_so_far;
      for (const V& v : agg_.order()) {
        auto it = tree_pos_.find(v);
        if (it != tree_pos_.end()) {
          size_t pos = it->second;
          tree_pos_.erase(it);
          if (pos + 1 != tree_boundary_.size()) {
            tree_boundary_[pos] = tree_boundary_.back();
            tree_pos_[tree_boundary_[pos]] = pos;
          }
          tree_boundary_.pop_back();
        }
        members_so_far.insert(v);
        g_->for_each_neighbor(v, [&](const V& w) {
          if (!members_so_far.count(w) && !tree_pos_.count(w)) {
            tree_pos_[w] = tree_boundary_.size();
            tree_boundary_.push_back(w);
          }
        });
      }
    }
  }

  // ---- packed coordinate walks -------------------------------------------

  uint64_t pack(const Coords& c) const {
    uint64_t key = 0;
    for (int i = dims_ - 1; i >= 0; --i)
      key = (key << pack_bits_) |
            static_cast<uint64_t>(static_cast<int64_t>(c[i]) + pack_off_);
    return key;
  }

  static int graph_dims(const G& g) {
    if constexpr (kIsTree)
      return 0;
    else
      return g.dims();
  }

  void rebuild_sticky() {
    if constexpr (kCoordsVertex) {
      dims_ = graph_dims(*g_);
      int64_t reach = cfg_.escape_radius(
          std::max<int64_t>(agg_.radius() * 2 + 16, 64));
      int bits = 1;
      while ((int64_t(1) << bits) < 2 * reach + 4) ++bits;
      packable_ = bits * dims_ <= 64;
      if (!packable_) return;
      pack_bits_ = bits;
      pack_off_ = reach + 1;
      pack_reach_ = reach;
      sticky_ = FlatSet64(2 * (agg_.members().size() + agg_.boundary().size()));
      for (const V& v : agg_.members()) sticky_.insert(pack(v));
      for (const V& v : agg_.boundary()) sticky_.insert(pack(v));
    }
  }

  std::pair<V, StepInfo> walk_attachment(int64_t step_index) {
    const int64_t rad = agg_.radius();
    int64_t launch_r = cfg_.launch_radius(rad);
    int64_t escape_r = cfg_.escape_radius(rad);
    if constexpr (kIsPerc) {
      // Finite surrogate: launch from the furthest available shell if the
      // nominal sphere lies beyond the realized cluster.
      launch_r = std::min(launch_r, g_->max_dist());
    }
    if constexpr (kCoordsVertex) {
      if (packable_ && escape_r > pack_reach_) rebuild_sticky();
      prepare_launch(launch_r);
    }

    const int W = cfg_.workers;
    for (int64_t base = 0; base < cfg_.max_attempts; base += W) {
      int64_t block = std::min<int64_t>(W, cfg_.max_attempts - base);
      if (block == 1) {
        auto res = one_attempt(step_index, base, launch_r, escape_r);
        if (res.first)
          return {*res.first, StepInfo{base + 1, res.second}};
        continue;
      }
      std::vector<std::optional<V>> hits(block);
      std::vector<int64_t> steps(block, 0);
      std::exception_ptr err;
      std::mutex err_mu;
      for_chunks(block, 1, W, [&](int64_t a0, int64_t a1) {
        for (int64_t a = a0; a < a1; ++a) {
          try {
            auto res = one_attempt(step_index, base + a, launch_r, escape_r);
            hits[a] = res.first;
            steps[a] = res.second;
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
          }
        }
      });
      if (err) std::rethrow_exception(err);
      for (int64_t a = 0; a < block; ++a)
        if (hits[a]) return {*hits[a], StepInfo{base + a + 1, steps[a]}};
    }
    throw SamplingError("no attachment found in " +
                        std::to_string(cfg_.max_attempts) +
                        " walk attempts at t=" + std::to_string(step_index));
  }

  // Must run before any parallel attempt block: advances the shared launch
  // caches so concurrent draws only read them.
  void prepare_launch(int64_t launch_r) {
    if constexpr (kIsLattice) {
      if (!lattice_sphere_ || lattice_sphere_->radius() != launch_r)
        lattice_sphere_.emplace(g_->dims(), launch_r);
    } else if constexpr (kCoordsVertex && !kIsPerc) {
      shell_cache_ptr()->sphere(launch_r);
    }
  }

  ShellCache<G>* shell_cache_ptr() {
    if constexpr (kCoordsVertex && !kIsLattice && !kIsPerc) {
      if (!shell_cache_) shell_cache_.emplace(*g_);
      return &*shell_cache_;
    }
    return nullptr;
  }

  V draw_launch(Rng& rng, int64_t launch_r) {
    if constexpr (kIsTree) {
      V w;
      w.reserve(static_cast<size_t>(launch_r));
      int k = g_->branching();
      for (int64_t i = 0; i < launch_r; ++i)
        w.push_back(static_cast<char>(
            rng.below(static_cast<uint64_t>(i == 0 ? k : k - 1))));
      return w;
    } else if constexpr (kIsLattice) {
      return lattice_sphere_->sample(rng);
    } else if constexpr (kIsPerc) {
      const auto& shell = g_->shell(launch_r);
      if (shell.empty())
        throw SamplingError("empty launch shell on percolation cluster");
      return shell[rng.below(shell.size())];
    } else {
      const auto& shell = shell_cache_ptr()->sphere(launch_r);
      if (shell.empty())
        throw SamplingError("empty launch shell");
      return shell[rng.below(shell.size())];
    }
  }

  // Runs one walk attempt; returns (hit vertex or nullopt, steps used).
  std::pair<std::optional<V>, int64_t> one_attempt(int64_t step_index,
                                                   int64_t attempt,
                                                   int64_t launch_r,
                                                   int64_t escape_r) {
    Rng rng = master_
                  .sub(tag::kAttachment, static_cast<uint64_t>(step_index),
                       static_cast<uint64_t>(attempt))
                  .rng();
    V start = draw_launch(rng, launch_r);
    if (agg_.is_boundary(start)) return {std::optional<V>(start), 0};
    if (agg_.is_member(start)) return {std::nullopt, 0};

    if constexpr (kCoordsVertex) {
      if (packable_) return packed_walk(start, rng, escape_r);
    }
    auto out = run_walk(
        *g_, start,
        [&](const V& v) { return agg_.is_member(v) || agg_.is_boundary(v); },
        escape_r, rng, cfg_.step_budget);
    if (out.end == WalkEnd::Hit) {
      if (agg_.is_member(out.where)) return {std::nullopt, out.steps};
      return {std::optional<V>(out.where), out.steps};
    }
    return {std::nullopt, out.steps};
  }

  std::pair<std::optional<V>, int64_t> packed_walk(Coords v, Rng& rng,
                                                   int64_t escape_r) {
    int64_t norm = g_->dist_to_root(v);
    for (int64_t steps = 1;; ++steps) {
      if (steps > cfg_.step_budget)
        throw BudgetError("walk exceeded step budget of " +
                          std::to_string(cfg_.step_budget));
      if constexpr (kIsLattice) {
        uint64_t dir = rng.below(static_cast<uint64_t>(2 * dims_));
        int axis = static_cast<int>(dir >> 1);
        int32_t sgn = (dir & 1) ? -1 : 1;
        int32_t before = v[axis];
        v[axis] += sgn;
        norm += (std::abs(v[axis]) > std::abs(before)) ? 1 : -1;
      } else {
        // Enumerate retained neighbours (degree varies on carpet and
        // percolation) and pick uniformly.
        Coords opts[2 * kMaxDims];
        int cnt = 0;
        g_->for_each_neighbor(v, [&](const Coords& w) { opts[cnt++] = w; });
        v = opts[rng.below(static_cast<uint64_t>(cnt))];
        if constexpr (kIsPerc)
          norm = g_->dist_to_root(v);
        else
          norm = l1_norm(v, dims_);
      }
      if (norm > escape_r) return {std::nullopt, steps};
      if (sticky_.contains(pack(v))) {
        if (agg_.is_member(v)) return {std::nullopt, steps};
        return {std::optional<V>(v), steps};
      }
    }
  }

  const G* g_;
  Aggregate<G> agg_;
  LaunchConfig cfg_;
  Stream master_;

  // tree fast path
  std::vector<V> tree_boundary_;
  std::unordered_map<V, size_t, H> tree_pos_;

  // packed coordinate path
  bool packable_ = false;
  int dims_ = 0;
  int pack_bits_ = 0;
  int64_t pack_off_ = 0;
  int64_t pack_reach_ = 0;
  FlatSet64 sticky_{16};
  std::optional<LatticeSphereSampler> lattice_sphere_;
  std::optional<ShellCache<G>> shell_cache_;
};

}  // namespace dla
