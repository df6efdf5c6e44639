#pragma once

// Shared test helpers: random connected sets, chi-square goodness-of-fit at
// the 0.999 level, and small numeric utilities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "dla/rng.hpp"

namespace testutil {

// Upper 0.999 quantiles of the chi-square distribution, df = 1..40. A test
// statistic above the table value rejects uniformity with p < 0.001.
inline double chi2_crit_999(int df) {
  static const double table[40] = {
      10.827566, 13.815511, 16.266236, 18.466827, 20.515006,
      22.457744, 24.321886, 26.124482, 27.877165, 29.588298,
      31.264134, 32.909490, 34.528179, 36.123274, 37.697298,
      39.252355, 40.790217, 42.312396, 43.820196, 45.314747,
      46.797038, 48.267942, 49.728232, 51.178598, 52.619656,
      54.051962, 55.476020, 56.892285, 58.301173, 59.703064,
      61.098306, 62.487219, 63.870099, 65.247217, 66.618829,
      67.985168, 69.346452, 70.702887, 72.054663, 73.401958};
  if (df < 1 || df > 40) throw std::runtime_error("chi2 table covers df 1..40");
  return table[df - 1];
}

// Pearson statistic for observed counts against expected probabilities.
inline double chi2_stat(const std::vector<int64_t>& counts,
                        const std::vector<double>& probs) {
  int64_t n = 0;
  for (int64_t c : counts) n += c;
  double stat = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    double e = probs[i] * static_cast<double>(n);
    double d = static_cast<double>(counts[i]) - e;
    stat += d * d / e;
  }
  return stat;
}

// Grows a random connected set containing the root: repeatedly attaches a
// uniformly chosen boundary vertex. Deterministic in (graph, size, seed).
template <class G>
std::vector<typename G::vertex_type> random_connected_set(const G& g,
                                                          int size,
                                                          uint64_t seed) {
  using V = typename G::vertex_type;
  dla::Rng rng = dla::Stream{seed}.sub(dla::tag::kRandomSet).rng();
  std::vector<V> set{g.root()};
  std::unordered_set<V, typename G::vertex_hash> members{g.root()};
  std::vector<V> boundary;
  std::unordered_set<V, typename G::vertex_hash> boundary_seen;
  auto expand = [&](const V& v) {
    g.for_each_neighbor(v, [&](const V& w) {
      if (!members.count(w) && boundary_seen.insert(w).second)
        boundary.push_back(w);
    });
  };
  expand(g.root());
  while (static_cast<int>(set.size()) < size) {
    if (boundary.empty()) break;  // finite component exhausted
    size_t i = static_cast<size_t>(rng.below(boundary.size()));
    V v = boundary[i];
    boundary[i] = boundary.back();
    boundary.pop_back();
    boundary_seen.erase(v);
    members.insert(v);
    set.push_back(v);
    expand(v);
  }
  return set;
}

inline bool close_rel(double a, double b, double tol) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-30});
  return std::fabs(a - b) <= tol * scale;
}

}  // namespace testutil
