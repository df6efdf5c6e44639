#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dla/errors.hpp"
#include "dla/rng.hpp"
#include "dla/workers.hpp"

namespace dla {

enum class WalkEnd { Hit, Escaped };

template <class V>
struct WalkOutcome {
  WalkEnd end;
  V where;        // hit vertex, or first vertex beyond the escape radius
  int64_t steps;
};

template <class G>
typename G::vertex_type neighbor_at(const G& g,
                                    const typename G::vertex_type& v,
                                    int idx) {
  typename G::vertex_type out = v;
  int i = 0;
  g.for_each_neighbor(v, [&](const typename G::vertex_type& w) {
    if (i++ == idx) out = w;
  });
  return out;
}

// Simple random walk from `start` until it hits a target (is_target) or its
// distance to the root exceeds escape_radius. Generic path; DLA hot loops use
// specialised samplers.
template <class G, class Pred>
WalkOutcome<typename G::vertex_type> run_walk(
    const G& g, typename G::vertex_type start, Pred&& is_target,
    int64_t escape_radius, Rng& rng, int64_t step_budget = 2'000'000'000) {
  using V = typename G::vertex_type;
  if (is_target(start)) return {WalkEnd::Hit, start, 0};
  if (g.dist_to_root(start) > escape_radius)
    return {WalkEnd::Escaped, start, 0};
  V v = start;
  for (int64_t steps = 1;; ++steps) {
    if (steps > step_budget)
      throw BudgetError("walk exceeded step budget of " +
                        std::to_string(step_budget));
    int d = g.degree(v);
    v = neighbor_at(g, v, static_cast<int>(rng.below(d)));
    if (is_target(v)) return {WalkEnd::Hit, v, steps};
    if (g.dist_to_root(v) > escape_radius) return {WalkEnd::Escaped, v, steps};
  }
}

struct GreenEstimate {
  double value = 0;    // mean visits to y within the step cutoff
  double stderr_ = 0;  // sample standard error of the mean
  int64_t walks = 0;
  int64_t cutoff = 0;
};

// Monte Carlo Green's function estimate: expected number of visits of the
// walk from x to y, truncated at `cutoff` steps (the time-truncation bias is
// the caller's responsibility; on transient families remaining mass decays
// like the heat-kernel tail). Walk i uses its own derived stream, so the
// estimate is independent of worker count.
template <class G>
GreenEstimate green_mc(const G& g, const typename G::vertex_type& x,
                       const typename G::vertex_type& y, int64_t walks,
                       int64_t cutoff, Stream stream, int workers = 1) {
  using V = typename G::vertex_type;
  if (walks < 1) throw ConfigError("green_mc needs at least one walk");
  if (cutoff < 0) throw ConfigError("green_mc cutoff must be non-negative");

  const int64_t chunk = 4096;
  const int64_t n_chunks = (walks + chunk - 1) / chunk;
  std::vector<double> sums(n_chunks, 0.0), sq_sums(n_chunks, 0.0);

  for_chunks(n_chunks, 1, workers, [&](int64_t c0, int64_t c1) {
    for (int64_t c = c0; c < c1; ++c) {
      double s = 0, s2 = 0;
      int64_t lo = c * chunk, hi = std::min<int64_t>(walks, lo + chunk);
      for (int64_t i = lo; i < hi; ++i) {
        Rng rng = stream.sub(tag::kGreenWalk, static_cast<uint64_t>(i)).rng();
        V v = x;
        int64_t visits = (v == y) ? 1 : 0;
        for (int64_t t = 0; t < cutoff; ++t) {
          v = neighbor_at(g, v, static_cast<int>(rng.below(g.degree(v))));
          if (v == y) ++visits;
        }
        double vis = static_cast<double>(visits);
        s += vis;
        s2 += vis * vis;
      }
      sums[c] = s;
      sq_sums[c] = s2;
    }
  });

  double total = 0, total_sq = 0;
  for (int64_t c = 0; c < n_chunks; ++c) {
    total += sums[c];
    total_sq += sq_sums[c];
  }
  GreenEstimate est;
  est.walks = walks;
  est.cutoff = cutoff;
  est.value = total / static_cast<double>(walks);
  if (walks > 1) {
    double var =
        (total_sq - total * total / static_cast<double>(walks)) /
        static_cast<double>(walks - 1);
    est.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(walks));
  }
  return est;
}

}  // namespace dla
