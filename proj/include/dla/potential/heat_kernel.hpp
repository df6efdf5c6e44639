#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dla/errors.hpp"
#include "dla/graph/lattice.hpp"

namespace dla {

namespace detail {

// log(sum exp(xs)) without overflow.
inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -HUGE_VAL;
  for (double x : xs) m = std::max(m, x);
  if (m == -HUGE_VAL) return -HUGE_VAL;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

// Exact return probabilities p_t(root, root) by sparse forward push of the
// full distribution. Memory grows with the ball of radius t; the support
// budget guards against exponential-volume families.
template <class G>
std::vector<double> heat_kernel_diag_push(const G& g, int t_max, bool lazy,
                                          uint64_t max_support = 20'000'000) {
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;
  if (t_max < 0) throw DomainError("heat kernel horizon must be >= 0");

  std::unordered_map<V, double, H> cur, nxt;
  cur[g.root()] = 1.0;
  std::vector<double> out(static_cast<size_t>(t_max) + 1, 0.0);
  out[0] = 1.0;
  for (int t = 1; t <= t_max; ++t) {
    nxt.clear();
    nxt.reserve(cur.size() * 2);
    for (const auto& [v, mass] : cur) {
      double moving = mass;
      if (lazy) {
        nxt[v] += mass * 0.5;
        moving = mass * 0.5;
      }
      double share = moving / g.degree(v);
      g.for_each_neighbor(v, [&](const V& w) { nxt[w] += share; });
    }
    if (nxt.size() > max_support)
      throw ResourceError("heat kernel support exceeds budget (" +
                          std::to_string(max_support) + ") at t=" +
                          std::to_string(t));
    cur.swap(nxt);
    auto it = cur.find(g.root());
    out[static_cast<size_t>(t)] = (it == cur.end()) ? 0.0 : it->second;
  }
  return out;
}

// log p_{2n}(0,0) for the simple walk on Z^d, n = 0..n_max:
//   p_{2n} = (2n)! / (2d)^{2n} * sum_{k_1+...+k_d = n} prod_i 1/(k_i!)^2,
// with the inner sum built as a d-fold log-domain convolution.
inline std::vector<double> lattice_log_return_even(int d, int n_max) {
  if (d < 1) throw DomainError("lattice dimension must be >= 1");
  if (n_max < 0) throw DomainError("horizon must be >= 0");
  std::vector<double> base(static_cast<size_t>(n_max) + 1);
  for (int k = 0; k <= n_max; ++k) base[k] = -2.0 * std::lgamma(k + 1.0);
  std::vector<double> conv = base;
  std::vector<double> terms;
  for (int rep = 1; rep < d; ++rep) {
    std::vector<double> next(static_cast<size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
      terms.clear();
      for (int k = 0; k <= n; ++k) terms.push_back(conv[k] + base[n - k]);
      next[n] = detail::log_sum_exp(terms);
    }
    conv = std::move(next);
  }
  std::vector<double> out(static_cast<size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    out[n] = std::lgamma(2.0 * n + 1.0) - 2.0 * n * std::log(2.0 * d) + conv[n];
  return out;
}

// Exact diagonal heat kernel on Z^d via the closed form (identical values to
// the push, without the ball-of-radius-t memory).
inline std::vector<double> heat_kernel_diag(const Lattice& g, int t_max,
                                            bool lazy) {
  if (t_max < 0) throw DomainError("heat kernel horizon must be >= 0");
  const int d = g.dims();
  const auto log_even = lattice_log_return_even(d, t_max / 2);
  std::vector<double> out(static_cast<size_t>(t_max) + 1, 0.0);
  if (!lazy) {
    for (int t = 0; t <= t_max; t += 2)
      out[static_cast<size_t>(t)] = std::exp(log_even[t / 2]);
    return out;
  }
  // Lazy chain: stay with prob 1/2, else step; mix over the binomial number
  // of real moves: p^L_t = sum_m C(t,m) 2^-t p_m, p_m = 0 for odd m.
  std::vector<double> terms;
  for (int t = 0; t <= t_max; ++t) {
    terms.clear();
    double lg_t = std::lgamma(t + 1.0);
    for (int m = 0; m <= t; m += 2)
      terms.push_back(lg_t - std::lgamma(m + 1.0) - std::lgamma(t - m + 1.0) -
                      t * std::log(2.0) + log_even[m / 2]);
    out[static_cast<size_t>(t)] = std::exp(detail::log_sum_exp(terms));
  }
  return out;
}

template <class G>
std::vector<double> heat_kernel_diag(const G& g, int t_max, bool lazy,
                                     uint64_t max_support = 20'000'000) {
  return heat_kernel_diag_push(g, t_max, lazy, max_support);
}

}  // namespace dla
