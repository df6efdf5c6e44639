#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dla/bounds.hpp"
#include "dla/errors.hpp"
#include "dla/graph/tree.hpp"

namespace dla {

struct GrowthPoint {
  int64_t t = 0;
  int64_t rad = 0;
};

struct GrowthRecord {
  std::string family;
  uint64_t seed = 0;
  std::string config_hash;
  std::vector<GrowthPoint> points;  // strictly increasing in t
};

// Reads a run stream: JSON header line then {"t","rad",...} records.
inline GrowthRecord parse_run_jsonl(std::istream& in) {
  GrowthRecord rec;
  std::string line;
  bool header_seen = false;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad JSON on line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    if (!header_seen) {
      if (!j.contains("kind") || j["kind"] != "dla-run")
        throw ConfigError("run stream must start with a dla-run header");
      rec.family = j.value("family", "");
      rec.seed = j.value("seed", uint64_t{0});
      rec.config_hash = j.value("config_hash", "");
      header_seen = true;
      continue;
    }
    if (!j.contains("t") || !j.contains("rad"))
      throw ConfigError("record on line " + std::to_string(line_no) +
                        " lacks t/rad");
    GrowthPoint p{j["t"].get<int64_t>(), j["rad"].get<int64_t>()};
    if (!rec.points.empty() && p.t <= rec.points.back().t)
      throw ConfigError("record times must increase (line " +
                        std::to_string(line_no) + ")");
    if (p.rad < 0) throw ConfigError("negative radius in record");
    rec.points.push_back(p);
  }
  if (!header_seen) throw ConfigError("empty run stream");
  return rec;
}

// First recorded time the radius reaches r (record granularity bounds the
// truth from above). Throws DomainError if never reached.
inline int64_t first_passage(const GrowthRecord& rec, int64_t r) {
  if (r <= 0) return 0;
  for (const auto& p : rec.points)
    if (p.rad >= r) return p.t;
  throw DomainError("radius " + std::to_string(r) + " never reached (max " +
                    std::to_string(rec.points.empty() ? 0
                                                      : rec.points.back().rad) +
                    ")");
}

// Geometric subsample (ratio 1.05) of the records in [t_min, t_max]; thins
// dense early records so log-log fits weight scales evenly.
inline std::vector<GrowthPoint> geometric_subsample(const GrowthRecord& rec,
                                                    int64_t t_min,
                                                    int64_t t_max,
                                                    double ratio = 1.05) {
  if (ratio <= 1.0) throw ConfigError("subsample ratio must exceed 1");
  std::vector<GrowthPoint> out;
  double target = static_cast<double>(std::max<int64_t>(t_min, 1));
  for (const auto& p : rec.points) {
    if (p.t > t_max) break;
    if (static_cast<double>(p.t) + 1e-9 >= target) {
      out.push_back(p);
      target = std::max(static_cast<double>(p.t) * ratio,
                        static_cast<double>(p.t) + 1.0);
    }
  }
  return out;
}

struct ExponentFit {
  double alpha = 0;      // slope of log rad vs log t
  double stderr_ = 0;    // standard error of the slope
  double intercept = 0;  // log prefactor
  int64_t n_points = 0;
  int64_t t_lo = 0, t_hi = 0;
};

namespace detail {

struct LineFit {
  double slope = 0, intercept = 0, stderr_ = 0;
};

inline LineFit least_squares(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0) throw DomainError("degenerate abscissa in regression");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
      double r = ys[i] - (f.intercept + f.slope * xs[i]);
      ss += r * r;
    }
    f.stderr_ = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

}  // namespace detail

// Log-log regression of radius against time over a geometric subsample.
inline ExponentFit fit_exponent(const GrowthRecord& rec, int64_t t_min,
                                int64_t t_max) {
  auto pts = geometric_subsample(rec, std::max<int64_t>(t_min, 1), t_max);
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    if (p.rad < 1) continue;  // log undefined; excludes the trivial start
    xs.push_back(std::log(static_cast<double>(p.t)));
    ys.push_back(std::log(static_cast<double>(p.rad)));
  }
  if (xs.size() < 20)
    throw DomainError("exponent fit needs at least 20 usable points, got " +
                      std::to_string(xs.size()));
  auto f = detail::least_squares(xs, ys);
  ExponentFit out;
  out.alpha = f.slope;
  out.stderr_ = f.stderr_;
  out.intercept = f.intercept;
  out.n_points = static_cast<int64_t>(xs.size());
  out.t_lo = pts.front().t;
  out.t_hi = pts.back().t;
  return out;
}

struct EnvelopeCheck {
  double sup_ratio = 0;   // max rad(t) / f(t)
  int64_t argmax_t = 0;
  double trend = 0;       // slope of log ratio vs log t (negative = tightening)
  int64_t n_points = 0;
};

// Compares a run against a radius envelope f: reports the worst ratio and the
// log-log trend of rad(t)/f(t) over a geometric subsample with t >= 3.
inline EnvelopeCheck envelope_ratio(const GrowthRecord& rec,
                                    const EnvelopeSpec& env, int64_t t_min,
                                    int64_t t_max) {
  auto pts = geometric_subsample(rec, std::max<int64_t>(t_min, 3), t_max);
  EnvelopeCheck out;
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    if (p.rad < 1) continue;
    double ratio = static_cast<double>(p.rad) / env.eval(static_cast<double>(p.t));
    if (ratio > out.sup_ratio) {
      out.sup_ratio = ratio;
      out.argmax_t = p.t;
    }
    xs.push_back(std::log(static_cast<double>(p.t)));
    ys.push_back(std::log(ratio));
  }
  if (xs.size() < 8)
    throw DomainError("envelope check needs at least 8 usable points, got " +
                      std::to_string(xs.size()));
  out.trend = detail::least_squares(xs, ys).slope;
  out.n_points = static_cast<int64_t>(xs.size());
  return out;
}

// Deterministic lower bound for tree growth: the aggregate is an
// ancestor-closed subtree, so s0 + t members force radius at least
// min{ r : |ball(r)| >= s0 + t }.
inline int64_t tree_radius_floor(int k, int64_t seed_size, int64_t t) {
  RegularTree g(k);
  uint64_t need = static_cast<uint64_t>(seed_size + t);
  int64_t r = 0;
  while (g.ball_size(r) < need) ++r;
  return r;
}

// --- exports -----------------------------------------------------------------

inline void write_growth_csv(std::ostream& out, const GrowthRecord& rec,
                             const ExponentFit& fit, const EnvelopeCheck& env) {
  out << "# dlab growth summary; config_hash=" << rec.config_hash << "\n";
  out << "family,seed,alpha_hat,stderr,sup_ratio,trend\n";
  out << rec.family << "," << rec.seed << "," << fit.alpha << "," << fit.stderr_
      << "," << env.sup_ratio << "," << env.trend << "\n";
}

// Two-column series for plotting: t radius.
inline void write_growth_plot(std::ostream& out, const GrowthRecord& rec) {
  out << "# t radius (family=" << rec.family << " seed=" << rec.seed << ")\n";
  for (const auto& p : rec.points) out << p.t << " " << p.rad << "\n";
}

}  // namespace dla
