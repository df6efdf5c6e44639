#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_set>
#include <vector>

#include "dla/bounds.hpp"
#include "dla/errors.hpp"
#include "dla/potential/solver.hpp"
#include "dla/workers.hpp"

namespace dla {

// Enumerates every connected set containing the root, up to max_size
// vertices, each exactly once (candidate-list enumeration: a set is reached
// only through its lexicographically forced insertion order). emit receives
// the members in insertion order (root first). Throws EnumerationBudgetError
// (carrying the emitted count) when max_sets is exceeded. Returns the number
// of sets emitted.
template <class G, class F>
uint64_t for_each_connected_set(const G& g, int max_size, uint64_t max_sets,
                                F&& emit) {
  using V = typename G::vertex_type;
  using H = typename G::vertex_hash;
  if (max_size < 1) throw DomainError("enumeration needs max_size >= 1");
  if (max_sets < 1) throw DomainError("enumeration needs a positive budget");

  std::vector<V> cur{g.root()};
  std::unordered_set<V, H> blocked{g.root()};
  uint64_t count = 1;
  emit(static_cast<const std::vector<V>&>(cur));

  std::vector<V> cand0 = g.neighbors(g.root());
  std::sort(cand0.begin(), cand0.end());
  for (const V& w : cand0) blocked.insert(w);

  auto rec = [&](auto&& self, const std::vector<V>& cand) -> void {
    if (static_cast<int>(cur.size()) >= max_size) return;
    for (size_t i = 0; i < cand.size(); ++i) {
      const V v = cand[i];
      cur.push_back(v);
      if (count == max_sets)
        throw EnumerationBudgetError(
            "connected-set enumeration exceeded budget of " +
                std::to_string(max_sets),
            count);
      ++count;
      emit(static_cast<const std::vector<V>&>(cur));

      if (static_cast<int>(cur.size()) < max_size) {
        std::vector<V> ext;
        g.for_each_neighbor(v, [&](const V& w) {
          if (!blocked.count(w)) ext.push_back(w);
        });
        std::sort(ext.begin(), ext.end());
        for (const V& w : ext) blocked.insert(w);
        std::vector<V> next;
        next.reserve(cand.size() - i - 1 + ext.size());
        next.insert(next.end(), cand.begin() + static_cast<int64_t>(i) + 1,
                    cand.end());
        next.insert(next.end(), ext.begin(), ext.end());
        self(self, next);
        for (const V& w : ext) blocked.erase(w);
      }
      cur.pop_back();
    }
  };
  rec(rec, cand0);
  return count;
}

template <class V>
struct BeurlingWorst {
  std::vector<V> set;    // insertion order, root first
  double sup_h = 0;      // largest harmonic value on the set
  V argmax{};
  double phi = 0;        // ansatz value at this size/radius
  double ratio = -1;     // sup_h / phi
  int64_t radius = 0;
};

template <class V>
struct BeurlingReport {
  PhiSpec phi;
  std::optional<PhiSpec> phi_radius;
  uint64_t sets_examined = 0;
  double fitted_C = 0;  // max over sets of sup_h / (phi/C): constant that
                        // would make the ansatz tight on this collection
  std::optional<double> fitted_C_radius;
  std::map<int64_t, BeurlingWorst<V>> worst_by_size;
  std::map<int64_t, BeurlingWorst<V>> worst_by_radius;  // radius >= 1 only
};

struct BeurlingOptions {
  int max_size = 6;
  PhiSpec phi;                          // volume-indexed ansatz to test
  std::optional<PhiSpec> phi_radius;    // optional radius-indexed ansatz
  SolverConfig solver;                  // default: one box of radius 12
  uint64_t max_sets = 5'000'000;
  int workers = 1;
};

// Exhaustive worst-case scan of harmonic measure over all connected root
// sets: solves each enumerated set and reports the worst sup_h / phi ratios
// per size and per radius, plus the constants that would make each ansatz
// hold with equality on this collection.
template <class G>
BeurlingReport<typename G::vertex_type> beurling_scan(const G& g,
                                                      BeurlingOptions opt) {
  using V = typename G::vertex_type;
  opt.phi.validate();
  if (!opt.phi.volume_indexed())
    throw ConfigError("beurling scan needs a volume-indexed phi");
  if (opt.phi_radius) {
    opt.phi_radius->validate();
    if (opt.phi_radius->volume_indexed())
      throw ConfigError("secondary ansatz must be radius-indexed");
  }
  if (opt.solver.box_radius == 0) {
    opt.solver.box_radius = 12;
    opt.solver.max_refinements = 0;
  }
  opt.solver.validate();

  std::vector<std::vector<V>> sets;
  BeurlingReport<V> rep;
  rep.phi = opt.phi;
  rep.phi_radius = opt.phi_radius;
  rep.sets_examined = for_each_connected_set(
      g, opt.max_size, opt.max_sets,
      [&](const std::vector<V>& s) { sets.push_back(s); });

  struct Local {
    std::map<int64_t, BeurlingWorst<V>> by_size, by_radius;
  };
  const int64_t chunk = 512;
  const int64_t n = static_cast<int64_t>(sets.size());
  const int64_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<Local> locals(static_cast<size_t>(n_chunks));

  for_chunks(n, chunk, opt.workers, [&](int64_t lo, int64_t hi) {
    Local& L = locals[static_cast<size_t>(lo / chunk)];
    for (int64_t si = lo; si < hi; ++si) {
      const std::vector<V>& s = sets[static_cast<size_t>(si)];
      auto sol = solve_escape(g, s, opt.solver);
      BeurlingWorst<V> w;
      w.set = s;
      size_t arg = 0;
      for (size_t i = 0; i < sol.harmonic.size(); ++i)
        if (sol.harmonic[i] > sol.harmonic[arg]) arg = i;
      w.sup_h = sol.harmonic[arg];
      w.argmax = s[arg];
      for (const V& v : s)
        w.radius = std::max(w.radius, g.dist_to_root(v));

      const int64_t size = static_cast<int64_t>(s.size());
      BeurlingWorst<V> by_s = w;
      by_s.phi = opt.phi.eval(static_cast<double>(size));
      by_s.ratio = by_s.sup_h / by_s.phi;
      auto it = L.by_size.find(size);
      if (it == L.by_size.end() || by_s.ratio > it->second.ratio)
        L.by_size[size] = by_s;

      if (opt.phi_radius && w.radius >= 1) {
        BeurlingWorst<V> by_r = w;
        by_r.phi = opt.phi_radius->eval(static_cast<double>(w.radius));
        by_r.ratio = by_r.sup_h / by_r.phi;
        auto jt = L.by_radius.find(w.radius);
        if (jt == L.by_radius.end() || by_r.ratio > jt->second.ratio)
          L.by_radius[w.radius] = by_r;
      }
    }
  });

  for (const Local& L : locals) {
    for (const auto& [size, w] : L.by_size) {
      auto it = rep.worst_by_size.find(size);
      if (it == rep.worst_by_size.end() || w.ratio > it->second.ratio)
        rep.worst_by_size[size] = w;
    }
    for (const auto& [rad, w] : L.by_radius) {
      auto it = rep.worst_by_radius.find(rad);
      if (it == rep.worst_by_radius.end() || w.ratio > it->second.ratio)
        rep.worst_by_radius[rad] = w;
    }
  }
  for (const auto& [size, w] : rep.worst_by_size)
    rep.fitted_C = std::max(rep.fitted_C, w.ratio * opt.phi.C);
  if (opt.phi_radius) {
    double c = 0;
    for (const auto& [rad, w] : rep.worst_by_radius)
      c = std::max(c, w.ratio * opt.phi_radius->C);
    rep.fitted_C_radius = c;
  }
  return rep;
}

}  // namespace dla
