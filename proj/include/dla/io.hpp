#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dla/coords.hpp"
#include "dla/errors.hpp"
#include "dla/graph/family.hpp"
#include "dla/sim/engine.hpp"
#include "dla/version.hpp"

namespace dla {

// FNV-1a over a canonical key=value rendering; used to stamp outputs with the
// configuration that produced them.
inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Portable vertex rendering: an array of integers (coordinates, or tree
// branch indices along the root path).
inline std::vector<int64_t> vertex_repr(const Lattice& g, const Coords& v) {
  return std::vector<int64_t>(v.begin(), v.begin() + g.dims());
}
inline std::vector<int64_t> vertex_repr(const PreSierpinskiCarpet& g,
                                        const Coords& v) {
  return std::vector<int64_t>(v.begin(), v.begin() + g.dims());
}
inline std::vector<int64_t> vertex_repr(const PercolationCluster& g,
                                        const Coords& v) {
  return std::vector<int64_t>(v.begin(), v.begin() + g.dims());
}
inline std::vector<int64_t> vertex_repr(const RegularTree&, const Word& v) {
  std::vector<int64_t> out;
  out.reserve(v.size());
  for (unsigned char c : v) out.push_back(static_cast<int64_t>(c));
  return out;
}

template <class G>
typename G::vertex_type vertex_from_repr(const G& g,
                                         const std::vector<int64_t>& repr) {
  using V = typename G::vertex_type;
  if constexpr (std::is_same_v<V, Word>) {
    Word w;
    for (int64_t b : repr) {
      if (b < 0 || b > 255) throw ConfigError("bad tree vertex encoding");
      w.push_back(static_cast<char>(b));
    }
    if (!g.contains(w)) throw ConfigError("vertex not in graph: bad branch");
    return w;
  } else {
    if (static_cast<int>(repr.size()) != g.dims())
      throw ConfigError("bad vertex encoding: wrong dimension");
    Coords c{};
    for (size_t i = 0; i < repr.size(); ++i) {
      if (repr[i] < INT32_MIN || repr[i] > INT32_MAX)
        throw ConfigError("bad vertex encoding: out of range");
      c[i] = static_cast<int32_t>(repr[i]);
    }
    if (!g.contains(c)) throw ConfigError("vertex not in graph");
    return c;
  }
}

// --- run records (JSON lines) ----------------------------------------------
//
// Line 1: header object {"version","family","seed","config_hash","kind"}.
// Then one object per recorded step: {"t": int, "rad": int, "v": [ints]}.

struct RunHeader {
  std::string family;
  uint64_t seed = 0;
  std::string config_hash;
};

inline void write_run_header(std::ostream& out, const RunHeader& h) {
  nlohmann::json j{{"kind", "dla-run"},
                   {"version", kVersion},
                   {"family", h.family},
                   {"seed", h.seed},
                   {"config_hash", h.config_hash}};
  out << j.dump() << "\n";
}

template <class G>
void write_record(std::ostream& out, const G& g, int64_t t, int64_t rad,
                  const typename G::vertex_type& v) {
  nlohmann::json j{{"t", t}, {"rad", rad}, {"v", vertex_repr(g, v)}};
  out << j.dump() << "\n";
}

// --- checkpoints -------------------------------------------------------------

// Complete resumable state: family spec, master seed, launch parameters, and
// the member list in insertion order. Because every attachment draws from a
// stream keyed by (seed, step, attempt), resuming from (members, t) continues
// the exact uninterrupted trajectory.
template <class G>
nlohmann::json checkpoint_json(const Engine<G>& eng,
                               const std::string& config_hash) {
  const auto& agg = eng.aggregate();
  const G& g = agg.graph();
  nlohmann::json members = nlohmann::json::array();
  for (const auto& v : agg.order()) members.push_back(vertex_repr(g, v));
  const LaunchConfig& lc = eng.config();
  return nlohmann::json{
      {"kind", "dla-checkpoint"},
      {"version", kVersion},
      {"family", g.family_tag()},
      {"seed", eng.master_seed()},
      {"config_hash", config_hash},
      {"t", agg.t()},
      {"launch",
       {{"launch_factor", lc.launch_factor},
        {"launch_offset", lc.launch_offset},
        {"escape_factor", lc.escape_factor},
        {"max_attempts", lc.max_attempts},
        {"step_budget", lc.step_budget},
        {"force_walk_sampler", lc.force_walk_sampler}}},
      {"members", std::move(members)}};
}

struct CheckpointData {
  std::string family;
  uint64_t seed = 0;
  std::string config_hash;
  int64_t t = 0;
  LaunchConfig launch;
  std::vector<std::vector<int64_t>> members;
};

inline CheckpointData parse_checkpoint(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "dla-checkpoint")
      throw ConfigError("not a checkpoint file");
    CheckpointData ck;
    ck.family = j.at("family").get<std::string>();
    ck.seed = j.at("seed").get<uint64_t>();
    ck.config_hash = j.value("config_hash", "");
    ck.t = j.at("t").get<int64_t>();
    const auto& l = j.at("launch");
    ck.launch.launch_factor = l.at("launch_factor").get<double>();
    ck.launch.launch_offset = l.at("launch_offset").get<int64_t>();
    ck.launch.escape_factor = l.at("escape_factor").get<double>();
    ck.launch.max_attempts = l.at("max_attempts").get<int64_t>();
    ck.launch.step_budget = l.at("step_budget").get<int64_t>();
    ck.launch.force_walk_sampler = l.at("force_walk_sampler").get<bool>();
    for (const auto& m : j.at("members"))
      ck.members.push_back(m.get<std::vector<int64_t>>());
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline CheckpointData load_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
  return parse_checkpoint(j);
}

// Rebuilds an engine from checkpoint data. The graph object must match the
// checkpoint's family tag.
template <class G>
Engine<G> resume_engine(const G& g, const CheckpointData& ck, int workers) {
  if (g.family_tag() != ck.family)
    throw ConfigError("checkpoint family " + ck.family +
                      " does not match graph " + g.family_tag());
  std::vector<typename G::vertex_type> order;
  order.reserve(ck.members.size());
  for (const auto& repr : ck.members)
    order.push_back(vertex_from_repr(g, repr));
  if (ck.t < 0 || ck.t > static_cast<int64_t>(order.size()))
    throw ConfigError("checkpoint particle count inconsistent with members");
  LaunchConfig lc = ck.launch;
  lc.workers = workers;
  // Restore the step counter so attachment streams continue where they left
  // off: step ck.t draws from the same stream it would have uninterrupted.
  Aggregate<G> agg(g, order, ck.t);
  return Engine<G>(g, std::move(agg), lc, ck.seed);
}

}  // namespace dla
