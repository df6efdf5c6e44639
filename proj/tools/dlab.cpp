// dlab: simulation and verification workbench for diffusion-limited
// aggregation on transient graphs.
//
// Subcommands: simulate, fit, beurling, potential (cap/sandwich/spectral/
// heat/green), bounds (fill/iphi/envelope/dim/gap). All results are JSON on
// stdout; errors are JSON on stderr with exit codes 1 (runtime), 2 (config),
// 3 (resource budget).

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dla/dla.hpp"

using nlohmann::json;

namespace {

// ---------- vertex / set grammar --------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t nxt = s.find(sep, pos);
    if (nxt == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, nxt - pos));
    pos = nxt + 1;
  }
  return out;
}

template <class G>
typename G::vertex_type parse_vertex(const G& g, const std::string& spec) {
  using V = typename G::vertex_type;
  if (spec == ".") return g.root();
  if constexpr (std::is_same_v<V, dla::Word>) {
    dla::Word w;
    for (char c : spec) {
      if (c < '0' || c > '9')
        throw dla::ConfigError("tree vertex must be a branch-digit string: " +
                               spec);
      w.push_back(static_cast<char>(c - '0'));
    }
    if (!g.contains(w))
      throw dla::ConfigError("not a tree vertex (branch out of range): " + spec);
    return w;
  } else {
    auto fields = split(spec, ',');
    if (static_cast<int>(fields.size()) != g.dims())
      throw dla::ConfigError("vertex " + spec + " must have " +
                             std::to_string(g.dims()) + " coordinates");
    dla::Coords c{};
    for (size_t i = 0; i < fields.size(); ++i) {
      try {
        c[i] = std::stoi(fields[i]);
      } catch (const std::exception&) {
        throw dla::ConfigError("bad coordinate in vertex: " + spec);
      }
    }
    if (!g.contains(c)) throw dla::ConfigError("vertex not in graph: " + spec);
    return c;
  }
}

// Set grammar: "root" | "ball:<r>" | "path:<len>" | vertex[;vertex...]
template <class G>
std::vector<typename G::vertex_type> parse_set(const G& g,
                                               const std::string& spec) {
  using V = typename G::vertex_type;
  if (spec.empty() || spec == "root") return {g.root()};
  if (spec.rfind("ball:", 0) == 0) {
    int64_t r;
    try {
      r = std::stoll(spec.substr(5));
    } catch (const std::exception&) {
      throw dla::ConfigError("bad ball radius: " + spec);
    }
    if (r < 0) throw dla::ConfigError("ball radius must be >= 0");
    std::vector<V> out{g.root()};
    std::unordered_set<V, typename G::vertex_hash> seen{g.root()};
    size_t head = 0;
    while (head < out.size()) {
      V v = out[head++];
      if (g.dist_to_root(v) == r) continue;
      g.for_each_neighbor(v, [&](const V& w) {
        if (seen.insert(w).second) out.push_back(w);
      });
      if (out.size() > 1'000'000)
        throw dla::ResourceError("seed ball exceeds 1e6 vertices");
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  if (spec.rfind("path:", 0) == 0) {
    int64_t len;
    try {
      len = std::stoll(spec.substr(5));
    } catch (const std::exception&) {
      throw dla::ConfigError("bad path length: " + spec);
    }
    if (len < 1) throw dla::ConfigError("path length must be >= 1");
    if (len > 1'000'000) throw dla::ResourceError("seed path exceeds 1e6 vertices");
    std::vector<V> out;
    if constexpr (std::is_same_v<V, dla::Word>) {
      dla::Word w;
      out.push_back(w);
      for (int64_t i = 1; i < len; ++i) {
        w.push_back(0);
        out.push_back(w);
      }
    } else {
      for (int64_t i = 0; i < len; ++i) {
        dla::Coords c{};
        c[0] = static_cast<int32_t>(i);
        if (!g.contains(c))
          throw dla::ConfigError("axis path leaves the graph at step " +
                                 std::to_string(i));
        out.push_back(c);
      }
    }
    return out;
  }
  std::vector<V> out;
  for (const auto& item : split(spec, ';')) {
    if (item.empty()) continue;
    out.push_back(parse_vertex(g, item));
  }
  if (out.empty()) throw dla::ConfigError("empty set spec: " + spec);
  return out;
}

template <class G>
json set_json(const G& g, const std::vector<typename G::vertex_type>& set) {
  json arr = json::array();
  for (const auto& v : set) arr.push_back(dla::vertex_repr(g, v));
  return arr;
}

// ---------- shared option blocks ---------------------------------------------

struct SolverOpts {
  int box_radius = 0;
  double rel_tol = 1e-3;
  int max_refinements = 6;
  int refine_add = 0;
  double refine_factor = 1.5;
  double residual_tol = 0;
  int64_t max_sweeps = 200000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--box-radius", box_radius,
                    "initial killing-shell distance (0 = auto)");
    cmd->add_option("--rel-tol", rel_tol, "capacity convergence tolerance");
    cmd->add_option("--max-refinements", max_refinements,
                    "box refinements after the first");
    cmd->add_option("--refine-add", refine_add,
                    "additive radius step (0 = multiplicative)");
    cmd->add_option("--refine-factor", refine_factor,
                    "multiplicative radius step");
    cmd->add_option("--residual-tol", residual_tol,
                    "inner SOR residual tolerance (0 = auto)");
    cmd->add_option("--max-sweeps", max_sweeps, "SOR sweep budget per box");
  }

  dla::SolverConfig to_config() const {
    dla::SolverConfig cfg;
    cfg.box_radius = box_radius;
    cfg.rel_tol = rel_tol;
    cfg.max_refinements = max_refinements;
    cfg.refine_add = refine_add;
    cfg.refine_factor = refine_factor;
    cfg.residual_tol = residual_tol;
    cfg.max_sweeps = max_sweeps;
    return cfg;
  }
};

// ---------- simulate ----------------------------------------------------------

struct SimulateOpts {
  std::string family;
  std::string seed_set = "root";
  uint64_t seed = 1;
  int64_t particles = 1000;
  int64_t record_every = 1;
  std::string out = "-";
  std::string checkpoint_path;
  int64_t checkpoint_every = 0;
  std::string resume_path;
  double launch_factor = 2.0;
  int64_t launch_offset = 5;
  double escape_factor = 4.0;
  int64_t max_attempts = 10'000'000;
  int64_t step_budget = 2'000'000'000;
  int workers = 1;
  bool force_walk_sampler = false;
};

std::string simulate_config_string(const SimulateOpts& o,
                                   const std::string& family_tag) {
  std::ostringstream ss;
  ss << "family=" << family_tag << ";seed=" << o.seed
     << ";seed_set=" << o.seed_set << ";particles=" << o.particles
     << ";record_every=" << o.record_every
     << ";launch_factor=" << o.launch_factor
     << ";launch_offset=" << o.launch_offset
     << ";escape_factor=" << o.escape_factor
     << ";force_walk_sampler=" << (o.force_walk_sampler ? 1 : 0);
  return ss.str();
}

template <class G>
void run_simulation(const G& g, const SimulateOpts& o) {
  dla::LaunchConfig lc;
  lc.launch_factor = o.launch_factor;
  lc.launch_offset = o.launch_offset;
  lc.escape_factor = o.escape_factor;
  lc.max_attempts = o.max_attempts;
  lc.step_budget = o.step_budget;
  lc.workers = o.workers;
  lc.force_walk_sampler = o.force_walk_sampler;

  std::optional<dla::Engine<G>> eng;
  if (!o.resume_path.empty()) {
    std::ifstream in(o.resume_path);
    if (!in) throw dla::ConfigError("cannot open checkpoint: " + o.resume_path);
    auto ck = dla::load_checkpoint(in);
    eng.emplace(dla::resume_engine(g, ck, o.workers));
  } else {
    dla::Aggregate<G> agg(g, parse_set(g, o.seed_set));
    eng.emplace(g, std::move(agg), lc, o.seed);
  }

  const std::string cfg_hash = dla::hash_hex(
      dla::fnv1a64(simulate_config_string(o, g.family_tag())));

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (o.out != "-") {
    file.open(o.out);
    if (!file) throw dla::ConfigError("cannot open output: " + o.out);
    out = &file;
  }
  dla::write_run_header(*out, {g.family_tag(), eng->master_seed(), cfg_hash});

  auto save_checkpoint = [&](const std::string& path) {
    std::ofstream ck(path);
    if (!ck) throw dla::ConfigError("cannot write checkpoint: " + path);
    ck << dla::checkpoint_json(*eng, cfg_hash).dump() << "\n";
  };

  for (int64_t i = 0; i < o.particles; ++i) {
    auto [v, info] = eng->step();
    (void)info;
    int64_t t = eng->aggregate().t();
    if (o.record_every <= 1 || t % o.record_every == 0 ||
        i + 1 == o.particles)
      dla::write_record(*out, g, t, eng->aggregate().radius(), v);
    if (!o.checkpoint_path.empty() && o.checkpoint_every > 0 &&
        t % o.checkpoint_every == 0)
      save_checkpoint(o.checkpoint_path);
  }
  if (!o.checkpoint_path.empty()) save_checkpoint(o.checkpoint_path);
  out->flush();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DLA workbench: simulation, harmonic-measure scans, potential "
               "theory checks, and growth-envelope analysis"};
  app.set_config("--config", "", "read options from an INI file");
  app.require_subcommand(0, 1);

  // --- simulate ---
  auto sim = std::make_shared<SimulateOpts>();
  CLI::App* c_sim = app.add_subcommand("simulate", "grow a DLA aggregate");
  c_sim->add_option("--family", sim->family,
                    "z<d> | tree<k> | carpet<n> | perc:<d>:<p>:<box>:<seed>");
  c_sim->add_option("--seed", sim->seed, "master RNG seed");
  c_sim->add_option("--particles", sim->particles, "number of attachments");
  c_sim->add_option("--seed-set", sim->seed_set,
                    "initial aggregate: root | ball:<r> | path:<len> | list");
  c_sim->add_option("--record-every", sim->record_every,
                    "record every Nth step (last step always recorded)");
  c_sim->add_option("--out", sim->out, "output JSONL path or - for stdout");
  c_sim->add_option("--checkpoint", sim->checkpoint_path, "checkpoint path");
  c_sim->add_option("--checkpoint-every", sim->checkpoint_every,
                    "checkpoint every N steps");
  c_sim->add_option("--resume", sim->resume_path, "resume from checkpoint");
  c_sim->add_option("--launch-factor", sim->launch_factor, "launch factor");
  c_sim->add_option("--launch-offset", sim->launch_offset, "launch offset");
  c_sim->add_option("--escape-factor", sim->escape_factor, "escape factor");
  c_sim->add_option("--max-attempts", sim->max_attempts,
                    "walk attempts per attachment");
  c_sim->add_option("--step-budget", sim->step_budget, "steps per walk");
  c_sim->add_option("--workers", sim->workers, "worker threads");
  c_sim->add_flag("--force-walk-sampler", sim->force_walk_sampler,
                  "use walk sampling even on trees");

  // --- fit ---
  struct FitOpts {
    std::string in = "-";
    int64_t t_min = 1, t_max = 0;
    std::string envelope = "auto";
    std::string csv, plot;
    int64_t first_passage_r = 0;
  };
  auto fit = std::make_shared<FitOpts>();
  CLI::App* c_fit = app.add_subcommand("fit", "growth exponent and envelope "
                                              "comparison from a run stream");
  c_fit->add_option("--in", fit->in, "run JSONL path or - for stdin");
  c_fit->add_option("--t-min", fit->t_min, "fit window start");
  c_fit->add_option("--t-max", fit->t_max, "fit window end (0 = last)");
  c_fit->add_option("--envelope", fit->envelope,
                    "family tag, 'auto' (from header), or 'none'");
  c_fit->add_option("--csv", fit->csv, "write summary CSV here");
  c_fit->add_option("--plot", fit->plot, "write t/radius series here");
  c_fit->add_option("--first-passage", fit->first_passage_r,
                    "also report first time radius reaches r");

  // --- beurling ---
  struct BeuOpts {
    std::string family;
    int max_size = 6;
    std::string phi = "inv:1";
    std::string phi_radius;
    uint64_t max_sets = 5'000'000;
    int workers = 1;
    SolverOpts solver;
  };
  auto beu = std::make_shared<BeuOpts>();
  CLI::App* c_beu = app.add_subcommand(
      "beurling", "exhaustive worst-case harmonic measure scan");
  c_beu->add_option("--family", beu->family, "graph family")->required();
  c_beu->add_option("--max-size", beu->max_size, "largest set size");
  c_beu->add_option("--phi", beu->phi,
                    "volume ansatz: pow:C:a[:b] | inv:C[:b]");
  c_beu->add_option("--phi-radius", beu->phi_radius,
                    "radius ansatz: rpow:C:a | rlog:C");
  c_beu->add_option("--max-sets", beu->max_sets, "enumeration budget");
  c_beu->add_option("--workers", beu->workers, "worker threads");
  beu->solver.attach(c_beu);

  // --- potential ---
  CLI::App* c_pot = app.add_subcommand("potential",
                                       "escape/capacity/Green computations");
  c_pot->require_subcommand(1);
  struct PotOpts {
    std::string family;
    std::string set = "root";
    SolverOpts solver;
    double sandwich_slack = 1e-6;
    int t_max = 50;
    bool lazy = true;
    std::string method = "auto";
    std::string x = ".", y = ".";
    int64_t walks = 100000, cutoff = 10000;
    uint64_t seed = 1;
    int workers = 1;
  };
  auto pot = std::make_shared<PotOpts>();
  CLI::App* c_cap = c_pot->add_subcommand("cap",
                                          "escape probabilities, equilibrium "
                                          "measure, harmonic measure, capacity");
  CLI::App* c_sand = c_pot->add_subcommand(
      "sandwich", "Green row-sum bracket of sum(deg)/capacity on one box");
  CLI::App* c_spec = c_pot->add_subcommand(
      "spectral", "tree capacity vs spectral-gap lower bound");
  CLI::App* c_heat = c_pot->add_subcommand("heat", "return probabilities p_t");
  CLI::App* c_green = c_pot->add_subcommand(
      "green", "Monte Carlo Green's function estimate");
  for (CLI::App* c : {c_cap, c_sand, c_spec, c_heat, c_green})
    c->add_option("--family", pot->family, "graph family")->required();
  for (CLI::App* c : {c_cap, c_sand, c_spec})
    c->add_option("--set", pot->set, "target set (set grammar)");
  pot->solver.attach(c_cap);
  pot->solver.attach(c_spec);
  c_sand->add_option("--box-radius", pot->solver.box_radius,
                     "killing-shell distance (0 = auto)");
  c_sand->add_option("--slack", pot->sandwich_slack, "relative slack");
  c_heat->add_option("--t-max", pot->t_max, "horizon");
  c_heat->add_flag("--lazy,!--no-lazy", pot->lazy, "lazy walk (default on)");
  c_heat->add_option("--method", pot->method, "auto | closed | push");
  c_green->add_option("--x", pot->x, "start vertex");
  c_green->add_option("--y", pot->y, "target vertex");
  c_green->add_option("--walks", pot->walks, "number of walks");
  c_green->add_option("--cutoff", pot->cutoff, "steps per walk");
  c_green->add_option("--seed", pot->seed, "RNG seed");
  c_green->add_option("--workers", pot->workers, "worker threads");

  // --- bounds ---
  CLI::App* c_bounds = app.add_subcommand(
      "bounds", "theorem-side quantities: fill bounds, envelopes, constants");
  c_bounds->require_subcommand(1);
  struct BoundOpts {
    std::string phi = "inv:1";
    int64_t s = 1, t = 1, n = 1, rad = 1;
    int max_degree = 4;
    std::string family;
    int dim_n = 3;
    int gap_k = 3;
  };
  auto bnd = std::make_shared<BoundOpts>();
  CLI::App* c_fill = c_bounds->add_subcommand(
      "fill", "window-counting bound on adding n particles in t steps");
  c_fill->add_option("--phi", bnd->phi, "ansatz spec")->required();
  c_fill->add_option("--s", bnd->s, "current set volume")->required();
  c_fill->add_option("--t", bnd->t, "window length")->required();
  c_fill->add_option("--n", bnd->n, "particles added")->required();
  c_fill->add_option("--max-degree", bnd->max_degree, "graph max degree")
      ->required();
  c_fill->add_option("--rad", bnd->rad, "set radius (radius-indexed phi)");
  CLI::App* c_iphi = c_bounds->add_subcommand("iphi", "I_phi(s,t)");
  c_iphi->add_option("--phi", bnd->phi, "volume ansatz")->required();
  c_iphi->add_option("--s", bnd->s, "volume")->required();
  c_iphi->add_option("--t", bnd->t, "window")->required();
  CLI::App* c_env = c_bounds->add_subcommand(
      "envelope", "growth envelope for a family or implied by an ansatz");
  c_env->add_option("--family", bnd->family, "family tag or 'pinched'");
  c_env->add_option("--phi", bnd->phi, "ansatz spec (used without --family)");
  CLI::App* c_dim = c_bounds->add_subcommand("dim", "carpet dimension d(n)");
  c_dim->add_option("--n", bnd->dim_n, "carpet dimension parameter")
      ->required();
  CLI::App* c_gap = c_bounds->add_subcommand("gap", "tree spectral gap");
  c_gap->add_option("--k", bnd->gap_k, "branching")->required();

  // ---- parse & dispatch ----
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err{{"error", {{"kind", "config"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(c_sim)) {
      if (!sim->resume_path.empty() && !sim->family.empty())
        throw dla::ConfigError("--family conflicts with --resume (family "
                               "comes from the checkpoint)");
      std::string family = sim->family;
      if (!sim->resume_path.empty()) {
        std::ifstream in(sim->resume_path);
        if (!in)
          throw dla::ConfigError("cannot open checkpoint: " + sim->resume_path);
        family = dla::load_checkpoint(in).family;
      }
      if (family.empty()) throw dla::ConfigError("--family is required");
      dla::Family fam = dla::parse_family(family);
      std::visit([&](const auto& g) { run_simulation(g, *sim); }, fam);
      return 0;
    }

    if (app.got_subcommand(c_fit)) {
      dla::GrowthRecord rec;
      if (fit->in == "-") {
        rec = dla::parse_run_jsonl(std::cin);
      } else {
        std::ifstream in(fit->in);
        if (!in) throw dla::ConfigError("cannot open input: " + fit->in);
        rec = dla::parse_run_jsonl(in);
      }
      if (rec.points.empty()) throw dla::DomainError("run has no records");
      int64_t t_max = fit->t_max > 0 ? fit->t_max : rec.points.back().t;
      auto f = dla::fit_exponent(rec, fit->t_min, t_max);
      json out{{"family", rec.family},
               {"seed", rec.seed},
               {"config_hash", rec.config_hash},
               {"alpha_hat", f.alpha},
               {"stderr", f.stderr_},
               {"intercept", f.intercept},
               {"n_points", f.n_points},
               {"t_lo", f.t_lo},
               {"t_hi", f.t_hi}};
      dla::EnvelopeCheck ec;
      bool have_env = false;
      if (fit->envelope != "none") {
        std::string tag =
            fit->envelope == "auto" ? rec.family : fit->envelope;
        auto env = dla::envelope_for(tag);
        ec = dla::envelope_ratio(rec, env, fit->t_min, t_max);
        have_env = true;
        out["envelope"] = {{"label", env.label},
                           {"source", env.source},
                           {"sup_ratio", ec.sup_ratio},
                           {"argmax_t", ec.argmax_t},
                           {"trend", ec.trend},
                           {"n_points", ec.n_points}};
      }
      if (fit->first_passage_r > 0)
        out["first_passage"] = {{"r", fit->first_passage_r},
                                {"t", dla::first_passage(rec, fit->first_passage_r)}};
      if (!fit->csv.empty()) {
        std::ofstream cs(fit->csv);
        if (!cs) throw dla::ConfigError("cannot open csv: " + fit->csv);
        dla::write_growth_csv(cs, rec, f, have_env ? ec : dla::EnvelopeCheck{});
      }
      if (!fit->plot.empty()) {
        std::ofstream pl(fit->plot);
        if (!pl) throw dla::ConfigError("cannot open plot: " + fit->plot);
        dla::write_growth_plot(pl, rec);
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (app.got_subcommand(c_beu)) {
      dla::Family fam = dla::parse_family(beu->family);
      dla::BeurlingOptions bo;
      bo.max_size = beu->max_size;
      bo.phi = dla::PhiSpec::parse(beu->phi);
      if (!beu->phi_radius.empty())
        bo.phi_radius = dla::PhiSpec::parse(beu->phi_radius);
      bo.max_sets = beu->max_sets;
      bo.workers = beu->workers;
      bo.solver = beu->solver.to_config();
      std::visit(
          [&](const auto& g) {
            auto rep = dla::beurling_scan(g, bo);
            json out{{"family", g.family_tag()},
                     {"phi", bo.phi.to_string()},
                     {"sets_examined", rep.sets_examined},
                     {"fitted_C", rep.fitted_C}};
            if (rep.fitted_C_radius) {
              out["phi_radius"] = bo.phi_radius->to_string();
              out["fitted_C_radius"] = *rep.fitted_C_radius;
            }
            auto dump_worst = [&](const auto& m) {
              json arr = json::array();
              for (const auto& [key, w] : m)
                arr.push_back({{"key", key},
                               {"size", w.set.size()},
                               {"radius", w.radius},
                               {"sup_h", w.sup_h},
                               {"phi", w.phi},
                               {"ratio", w.ratio},
                               {"argmax", dla::vertex_repr(g, w.argmax)},
                               {"set", set_json(g, w.set)}});
              return arr;
            };
            out["worst_by_size"] = dump_worst(rep.worst_by_size);
            out["worst_by_radius"] = dump_worst(rep.worst_by_radius);
            std::cout << out.dump(2) << "\n";
          },
          fam);
      return 0;
    }

    if (app.got_subcommand(c_pot)) {
      dla::Family fam = dla::parse_family(pot->family);
      if (c_pot->got_subcommand(c_cap)) {
        std::visit(
            [&](const auto& g) {
              auto set = parse_set(g, pot->set);
              auto res = dla::solve_escape(g, set, pot->solver.to_config());
              json out{{"family", g.family_tag()},
                       {"set", set_json(g, set)},
                       {"capacity", res.capacity},
                       {"converged", res.converged},
                       {"achieved_rel_delta", res.achieved_rel_delta},
                       {"box_radii", res.box_radii},
                       {"box_capacities", res.box_capacities},
                       {"escape", res.escape},
                       {"equilibrium", res.equilibrium},
                       {"harmonic", res.harmonic}};
              std::cout << out.dump(2) << "\n";
            },
            fam);
      } else if (c_pot->got_subcommand(c_sand)) {
        std::visit(
            [&](const auto& g) {
              auto set = parse_set(g, pot->set);
              int R = pot->solver.box_radius > 0 ? pot->solver.box_radius : 12;
              auto rep = dla::capacity_sandwich_check(g, set, R,
                                                      pot->sandwich_slack);
              json out{{"family", g.family_tag()},
                       {"set", set_json(g, set)},
                       {"box_radius", rep.box_radius},
                       {"lower", rep.lower},
                       {"middle", rep.middle},
                       {"upper", rep.upper},
                       {"capacity", rep.capacity},
                       {"ok", rep.ok},
                       {"max_symmetry_rel_err", rep.max_symmetry_rel_err},
                       {"row_sums", rep.row_sums}};
              std::cout << out.dump(2) << "\n";
            },
            fam);
      } else if (c_pot->got_subcommand(c_spec)) {
        auto* tree = std::get_if<dla::RegularTree>(&fam);
        if (!tree)
          throw dla::ConfigError("spectral check is defined on trees only");
        auto set = parse_set(*tree, pot->set);
        auto rep = dla::spectral_capacity_check(*tree, set,
                                                pot->solver.to_config());
        json out{{"family", tree->family_tag()},
                 {"set", set_json(*tree, set)},
                 {"lambda", rep.lambda},
                 {"bound", rep.bound},
                 {"capacity", rep.capacity},
                 {"ok", rep.ok}};
        std::cout << out.dump(2) << "\n";
      } else if (c_pot->got_subcommand(c_heat)) {
        std::vector<double> p;
        std::string used = pot->method;
        if (pot->method == "closed" ||
            (pot->method == "auto" &&
             std::holds_alternative<dla::Lattice>(fam))) {
          auto* lat = std::get_if<dla::Lattice>(&fam);
          if (!lat)
            throw dla::ConfigError("closed-form heat kernel needs a lattice");
          p = dla::heat_kernel_diag(*lat, pot->t_max, pot->lazy);
          used = "closed";
        } else if (pot->method == "push" || pot->method == "auto") {
          p = std::visit(
              [&](const auto& g) {
                return dla::heat_kernel_diag_push(g, pot->t_max, pot->lazy);
              },
              fam);
          used = "push";
        } else {
          throw dla::ConfigError("heat method must be auto|closed|push");
        }
        json out{{"family", dla::family_tag(fam)},
                 {"lazy", pot->lazy},
                 {"method", used},
                 {"p", p}};
        std::cout << out.dump(2) << "\n";
      } else if (c_pot->got_subcommand(c_green)) {
        std::visit(
            [&](const auto& g) {
              auto x = parse_vertex(g, pot->x);
              auto y = parse_vertex(g, pot->y);
              auto est = dla::green_mc(g, x, y, pot->walks, pot->cutoff,
                                       dla::Stream{pot->seed}, pot->workers);
              json out{{"family", g.family_tag()},
                       {"x", dla::vertex_repr(g, x)},
                       {"y", dla::vertex_repr(g, y)},
                       {"value", est.value},
                       {"stderr", est.stderr_},
                       {"walks", est.walks},
                       {"cutoff", est.cutoff}};
              std::cout << out.dump(2) << "\n";
            },
            fam);
      }
      return 0;
    }

    if (app.got_subcommand(c_bounds)) {
      if (c_bounds->got_subcommand(c_fill)) {
        auto phi = dla::PhiSpec::parse(bnd->phi);
        dla::FillBound fb =
            phi.volume_indexed()
                ? dla::fill_in_order_bound(phi, bnd->s, bnd->t, bnd->n,
                                           bnd->max_degree)
                : dla::fill_in_order_bound_radius(phi, bnd->s, bnd->rad,
                                                  bnd->t, bnd->n,
                                                  bnd->max_degree);
        json out{{"phi", phi.to_string()}, {"s", bnd->s},
                 {"t", bnd->t},           {"n", bnd->n},
                 {"max_degree", bnd->max_degree}, {"intensity", fb.intensity},
                 {"raw", fb.raw},         {"prob", fb.prob}};
        if (phi.beta > 0 || phi.kind == dla::PhiSpec::Kind::RadiusLogOverR)
          out["phi_log_convention"] = "log(x+2)";
        std::cout << out.dump(2) << "\n";
      } else if (c_bounds->got_subcommand(c_iphi)) {
        auto phi = dla::PhiSpec::parse(bnd->phi);
        json out{{"phi", phi.to_string()},
                 {"s", bnd->s},
                 {"t", bnd->t},
                 {"value", dla::i_phi(phi, bnd->s, bnd->t)}};
        if (phi.beta > 0) out["phi_log_convention"] = "log(x+2)";
        std::cout << out.dump(2) << "\n";
      } else if (c_bounds->got_subcommand(c_env)) {
        dla::EnvelopeSpec env;
        if (!bnd->family.empty()) {
          env = dla::envelope_for(bnd->family);
        } else {
          auto phi = dla::PhiSpec::parse(bnd->phi);
          env = phi.volume_indexed() ? dla::kesten_volume_envelope(phi)
                                     : dla::kesten_radius_envelope(phi);
        }
        json out{{"power", env.power},
                 {"log_power", env.log_power},
                 {"label", env.label},
                 {"source", env.source}};
        std::cout << out.dump(2) << "\n";
      } else if (c_bounds->got_subcommand(c_dim)) {
        json out{{"n", bnd->dim_n},
                 {"dimension", dla::carpet_dimension(bnd->dim_n)}};
        std::cout << out.dump(2) << "\n";
      } else if (c_bounds->got_subcommand(c_gap)) {
        json out{{"k", bnd->gap_k},
                 {"gap", dla::tree_spectral_gap(bnd->gap_k)}};
        std::cout << out.dump(2) << "\n";
      }
      return 0;
    }

    std::cout << app.help() << "\n";
    return 0;
  } catch (const dla::Error& e) {
    const char* kind = e.kind() == dla::ErrorKind::Config     ? "config"
                       : e.kind() == dla::ErrorKind::Resource ? "resource"
                                                              : "runtime";
    json err{{"error", {{"kind", kind}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    json err{{"error", {{"kind", "runtime"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
