#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "dla/errors.hpp"
#include "dla/graph/tree.hpp"

namespace dla {

struct SolverConfig {
  // First box radius (distance from the target set to the killing shell);
  // 0 = auto (12).
  int box_radius = 0;
  // Refinement schedule: R -> R+refine_add when refine_add > 0, otherwise
  // R -> ceil(R * refine_factor). Families with exponential volume growth
  // need the additive schedule to stay within memory.
  double refine_factor = 1.5;
  int refine_add = 0;
  int max_refinements = 6;
  // Convergence certificate: successive extrapolated capacities must agree to
  // this relative tolerance.
  double rel_tol = 1e-3;
  // Inner SOR sweep tolerance on the max residual; 0 = auto from rel_tol.
  double residual_tol = 0;
  // SOR relaxation parameter; 0 = auto from the box radius.
  double omega = 0;
  int64_t max_sweeps = 200000;
  uint64_t max_box_vertices = 5'000'000;

  void validate() const {
    if (box_radius != 0 && box_radius < 2)
      throw ConfigError("solver box radius must be >= 2");
    if (refine_factor <= 1.0 && refine_add <= 0)
      throw ConfigError("solver refinement must increase the box radius");
    if (max_refinements < 0) throw ConfigError("max_refinements must be >= 0");
    if (rel_tol <= 0) throw ConfigError("solver rel_tol must be positive");
    if (omega != 0 && (omega <= 0 || omega >= 2))
      throw ConfigError("SOR omega must lie in (0,2)");
    if (max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
  }
};

// Finite linear system for the walk around a set A, killed on the sphere of
// BFS-distance `radius` from A. Vertex order: A in caller order, then
// interior vertices layer by layer — deterministic, so float accumulation
// (and thus output) is bit-stable.
template <class G>
struct PotentialBox {
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;

  std::vector<V> verts;
  size_t n_set = 0;                // verts[0..n_set) is A
  std::vector<int32_t> deg;        // full graph degree
  std::vector<int32_t> shell_cnt;  // edges into the killing shell
  std::vector<int32_t> adj;        // CSR neighbour indices into verts
  std::vector<int64_t> adj_start;
  int radius = 0;
};

template <class G>
PotentialBox<G> build_potential_box(const G& g,
                                    const std::vector<typename G::vertex_type>& set,
                                    int radius, uint64_t max_vertices) {
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;
  if (set.empty()) throw DomainError("potential solve needs a non-empty set");
  if (radius < 2) throw ConfigError("potential box radius must be >= 2");

  PotentialBox<G> box;
  box.radius = radius;
  std::unordered_map<V, int32_t, H> layer;  // BFS distance from the set
  layer.reserve(set.size() * 4);
  for (const V& a : set)
    if (!layer.emplace(a, 0).second)
      throw DomainError("set for potential solve has duplicate vertices");

  box.verts = set;
  std::vector<V> frontier = set, next;
  for (int ell = 1; ell <= radius; ++ell) {
    for (const V& v : frontier)
      g.for_each_neighbor(v, [&](const V& w) {
        if (layer.emplace(w, ell).second) next.push_back(w);
      });
    if (layer.size() > max_vertices)
      throw ResourceError("potential box exceeds vertex budget (" +
                          std::to_string(max_vertices) + ") at radius " +
                          std::to_string(radius));
    if (ell < radius)
      box.verts.insert(box.verts.end(), next.begin(), next.end());
    frontier = std::move(next);
    next.clear();
  }

  const size_t n = box.verts.size();
  box.n_set = set.size();
  std::unordered_map<V, int32_t, H> index;
  index.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) index.emplace(box.verts[i], static_cast<int32_t>(i));

  box.deg.resize(n);
  box.shell_cnt.assign(n, 0);
  box.adj_start.assign(n + 1, 0);
  box.adj.reserve(n * 4);
  for (size_t i = 0; i < n; ++i) {
    const V& v = box.verts[i];
    int d = 0;
    g.for_each_neighbor(v, [&](const V& w) {
      ++d;
      auto it = index.find(w);
      if (it != index.end()) {
        box.adj.push_back(it->second);
      } else {
        // Neighbour outside the unknowns: must be on the killing shell.
        ++box.shell_cnt[i];
      }
    });
    box.deg[i] = d;
    box.adj_start[i + 1] = static_cast<int64_t>(box.adj.size());
  }
  return box;
}

namespace detail {

inline double auto_omega(int radius) {
  double w = 2.0 / (1.0 + std::sin(M_PI / (2.0 * radius + 1.0)));
  return std::clamp(w, 1.0, 1.95);
}

inline double auto_residual_tol(double rel_tol) {
  return std::clamp(rel_tol / 50.0, 1e-12, 1e-6);
}

// SOR sweeps for u_i = b_i + (sum_adj u_j + shell_cnt_i * shell_value)/deg_i
// over indices [begin, end); entries outside stay fixed (Dirichlet data).
template <class G>
void sor_solve(const PotentialBox<G>& box, std::vector<double>& u,
               const std::vector<double>& b, double shell_value, size_t begin,
               size_t end, double omega, double tol, int64_t max_sweeps) {
  for (int64_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double resid = 0;
    for (size_t i = begin; i < end; ++i) {
      double s = box.shell_cnt[i] * shell_value;
      for (int64_t a = box.adj_start[i]; a < box.adj_start[i + 1]; ++a)
        s += u[static_cast<size_t>(box.adj[a])];
      double raw = b[i] + s / box.deg[i];
      double delta = raw - u[i];
      resid = std::max(resid, std::fabs(delta));
      u[i] += omega * delta;
    }
    if (resid < tol) return;
  }
  throw SolverError("SOR failed to reach tolerance " + std::to_string(tol) +
                    " in " + std::to_string(max_sweeps) + " sweeps (box radius " +
                    std::to_string(box.radius) + ")");
}

inline double aitken(double a, double b, double c) {
  double d1 = b - a, d2 = c - b;
  double denom = d2 - d1;
  if (std::fabs(denom) < 1e-14 * std::max({std::fabs(a), std::fabs(c), 1e-300}))
    return c;
  return c - d2 * d2 / denom;
}

}  // namespace detail

// Escape data for one fixed box: u = P_.[hit shell before returning to A]
// with A held at 0 and the shell at 1.
struct BoxEscape {
  std::vector<double> escape;  // P_x[walk leaves the box before re-hitting A]
  double capacity = 0;         // sum_x deg(x) * escape(x)
};

template <class G>
BoxEscape solve_escape_box(const G& g, const PotentialBox<G>& box,
                           double omega, double tol, int64_t max_sweeps) {
  (void)g;
  const size_t n = box.verts.size();
  std::vector<double> u(n, 0.0), b(n, 0.0);
  detail::sor_solve(box, u, b, /*shell_value=*/1.0, box.n_set, n, omega, tol,
                    max_sweeps);
  BoxEscape out;
  out.escape.resize(box.n_set);
  for (size_t i = 0; i < box.n_set; ++i) {
    double s = box.shell_cnt[i] * 1.0;
    for (int64_t a = box.adj_start[i]; a < box.adj_start[i + 1]; ++a)
      s += u[static_cast<size_t>(box.adj[a])];
    out.escape[i] = s / box.deg[i];
    out.capacity += box.deg[i] * out.escape[i];
  }
  return out;
}

// Expected visits to verts[target] before leaving the box, from every vertex
// of the box (the set is NOT absorbing). Column of the box Green's function.
template <class G>
std::vector<double> solve_green_column(const G& g, const PotentialBox<G>& box,
                                       size_t target, double omega, double tol,
                                       int64_t max_sweeps) {
  (void)g;
  const size_t n = box.verts.size();
  std::vector<double> u(n, 0.0), b(n, 0.0);
  b[target] = 1.0;
  detail::sor_solve(box, u, b, /*shell_value=*/0.0, 0, n, omega, tol,
                    max_sweeps);
  return u;
}

template <class V>
struct PotentialSolveResult {
  std::vector<V> set;              // caller order
  std::vector<double> escape;      // extrapolated escape probabilities
  std::vector<double> equilibrium; // deg(x) * escape(x)
  std::vector<double> harmonic;    // equilibrium / capacity
  double capacity = 0;
  bool converged = false;
  double achieved_rel_delta = HUGE_VAL;
  std::vector<int> box_radii;
  std::vector<double> box_capacities;
};

// Escape probabilities / equilibrium measure / capacity of a finite set,
// via killed-box solves on a growing schedule of boxes with Aitken
// extrapolation of the (monotone, geometric-delta) capacity sequence.
template <class G>
PotentialSolveResult<typename G::vertex_type> solve_escape(
    const G& g, const std::vector<typename G::vertex_type>& set,
    SolverConfig cfg = {}) {
  using V = typename G::vertex_type;
  cfg.validate();
  for (const V& v : set)
    if (!g.contains(v))
      throw DomainError("potential solve: vertex not in graph");

  int R = cfg.box_radius > 0 ? cfg.box_radius : 12;
  if constexpr (std::is_same_v<G, RegularTree>) {
    // Exponential volume growth: geometric radius schedules blow the memory
    // budget, while additive steps already shrink errors geometrically.
    if (cfg.refine_add == 0) cfg.refine_add = 4;
  }
  const double inner_tol = cfg.residual_tol > 0
                               ? cfg.residual_tol
                               : detail::auto_residual_tol(cfg.rel_tol);

  PotentialSolveResult<V> res;
  res.set = set;
  std::vector<std::vector<double>> escapes;
  std::vector<double> caps;
  std::vector<double> prev_ait;
  for (int k = 0; k <= cfg.max_refinements; ++k) {
    PotentialBox<G> box;
    try {
      box = build_potential_box(g, set, R, cfg.max_box_vertices);
    } catch (const ResourceError&) {
      // Over budget: bisect the radius back toward the last one that fit
      // (or the minimum) and retry, so families with exponential volume
      // growth still get the largest schedule the budget allows. Each retry
      // strictly shrinks the gap, so the loop terminates.
      int floor_R = caps.empty() ? 2 : res.box_radii.back() + 1;
      if (R <= floor_R) {
        if (caps.empty()) throw;  // cannot build even the minimal box
        break;
      }
      R = floor_R + (R - floor_R) / 2;
      --k;
      continue;
    }
    double omega = cfg.omega > 0 ? cfg.omega : detail::auto_omega(R);
    auto esc = solve_escape_box(g, box, omega, inner_tol, cfg.max_sweeps);
    escapes.push_back(std::move(esc.escape));
    caps.push_back(esc.capacity);
    res.box_radii.push_back(R);
    res.box_capacities.push_back(esc.capacity);

    if (caps.size() >= 3) {
      size_t m = caps.size();
      double ait = detail::aitken(caps[m - 3], caps[m - 2], caps[m - 1]);
      double scale = std::max(std::fabs(ait), 1e-12);
      // Certified when the raw sequence itself has settled, or when two
      // successive extrapolations agree.
      double delta = std::fabs(ait - caps[m - 1]);
      if (!prev_ait.empty())
        delta = std::min(delta, std::fabs(ait - prev_ait.back()));
      res.achieved_rel_delta = delta / scale;
      prev_ait.push_back(ait);
      if (res.achieved_rel_delta <= cfg.rel_tol) {
        res.converged = true;
        break;
      }
    }
    R = cfg.refine_add > 0
            ? R + cfg.refine_add
            : static_cast<int>(std::ceil(R * cfg.refine_factor));
  }

  const size_t m = caps.size();
  const size_t ns = set.size();
  res.escape.resize(ns);
  if (m >= 3) {
    for (size_t i = 0; i < ns; ++i)
      res.escape[i] = std::clamp(
          detail::aitken(escapes[m - 3][i], escapes[m - 2][i], escapes[m - 1][i]),
          0.0, 1.0);
  } else {
    res.escape = escapes.back();
  }
  // Capacity is kept self-consistent with the extrapolated escape vector, so
  // the harmonic entries sum to exactly 1.
  res.equilibrium.resize(ns);
  res.harmonic.assign(ns, 0.0);
  res.capacity = 0;
  for (size_t i = 0; i < ns; ++i) {
    res.equilibrium[i] = g.degree(set[i]) * res.escape[i];
    res.capacity += res.equilibrium[i];
  }
  if (res.capacity > 0)
    for (size_t i = 0; i < ns; ++i) res.harmonic[i] = res.equilibrium[i] / res.capacity;
  return res;
}

// Identity check on one fixed killed box, where it holds exactly: the killed
// chain is itself transient and reversible, so
//   min_x sum_y g(x,y) <= sum_x deg(x) / cap <= max_x sum_y g(x,y)
// with every quantity computed for the same box.
struct SandwichReport {
  double lower = 0, middle = 0, upper = 0;
  bool ok = false;
  double rel_slack = 0;
  int box_radius = 0;
  double capacity = 0;
  double max_symmetry_rel_err = 0;  // deg(x)g(x,y) vs deg(y)g(y,x)
  std::vector<double> row_sums;
};

template <class G>
SandwichReport capacity_sandwich_check(
    const G& g, const std::vector<typename G::vertex_type>& set,
    int box_radius, double rel_slack = 1e-6, SolverConfig inner = {}) {
  inner.validate();
  if (box_radius < 2) throw ConfigError("sandwich box radius must be >= 2");
  const double tol = inner.residual_tol > 0 ? inner.residual_tol : 1e-11;
  auto box = build_potential_box(g, set, box_radius, inner.max_box_vertices);
  double omega = inner.omega > 0 ? inner.omega : detail::auto_omega(box_radius);
  auto esc = solve_escape_box(g, box, omega, tol, inner.max_sweeps);

  const size_t ns = set.size();
  std::vector<std::vector<double>> green(ns);  // green[y][x] = g(x, set[y])
  for (size_t y = 0; y < ns; ++y)
    green[y] = solve_green_column(g, box, y, omega, tol, inner.max_sweeps);

  SandwichReport rep;
  rep.box_radius = box_radius;
  rep.rel_slack = rel_slack;
  rep.capacity = esc.capacity;
  double deg_total = 0;
  for (size_t i = 0; i < ns; ++i) deg_total += box.deg[i];
  rep.middle = esc.capacity > 0 ? deg_total / esc.capacity : HUGE_VAL;
  rep.row_sums.resize(ns);
  for (size_t x = 0; x < ns; ++x) {
    double s = 0;
    for (size_t y = 0; y < ns; ++y) s += green[y][x];
    rep.row_sums[x] = s;
  }
  rep.lower = *std::min_element(rep.row_sums.begin(), rep.row_sums.end());
  rep.upper = *std::max_element(rep.row_sums.begin(), rep.row_sums.end());
  for (size_t x = 0; x < ns; ++x)
    for (size_t y = x + 1; y < ns; ++y) {
      double a = box.deg[x] * green[y][x];
      double b = box.deg[y] * green[x][y];
      double err = std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-12});
      rep.max_symmetry_rel_err = std::max(rep.max_symmetry_rel_err, err);
    }
  double scale = std::max(std::fabs(rep.middle), 1e-12);
  rep.ok = rep.lower <= rep.middle + rel_slack * scale &&
           rep.middle <= rep.upper + rel_slack * scale;
  return rep;
}

// Capacity lower bound from the spectral gap of the k-regular tree:
// lambda = 1 - 2 sqrt(k-1)/k, and cap(A) >= lambda * sum_{x in A} deg(x).
struct SpectralReport {
  double lambda = 0;
  double bound = 0;
  double capacity = 0;
  bool ok = false;
};

inline SpectralReport spectral_capacity_check(const RegularTree& g,
                                              const std::vector<Word>& set,
                                              SolverConfig cfg = {}) {
  SpectralReport rep;
  int k = g.branching();
  rep.lambda = 1.0 - 2.0 * std::sqrt(static_cast<double>(k - 1)) / k;
  rep.bound = rep.lambda * static_cast<double>(k) * static_cast<double>(set.size());
  auto res = solve_escape(g, set, cfg);
  rep.capacity = res.capacity;
  rep.ok = rep.capacity >= rep.bound * (1.0 - 1e-9) - 1e-12;
  return rep;
}

}  // namespace dla
