#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "dla/errors.hpp"

namespace dla {

// Decay ansatz for the maximum harmonic-measure value of a growing set,
// indexed either by set volume s or by set radius r. The log convention is
// L(x) = log(x + 2), so every kind is finite and positive from x = 1 on.
struct PhiSpec {
  enum class Kind {
    VolumePower,    // phi(s) = C * L(s)^beta / s^alpha,  alpha in (0,1)
    VolumeInverse,  // phi(s) = C * L(s)^beta / s
    RadiusPower,    // phi(r) = C / r^alpha,              alpha in (0,1]
    RadiusLogOverR  // phi(r) = C * L(r) / r
  };

  Kind kind = Kind::VolumeInverse;
  double C = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  bool volume_indexed() const {
    return kind == Kind::VolumePower || kind == Kind::VolumeInverse;
  }

  void validate() const {
    if (!(C > 0)) throw ConfigError("phi constant must be positive");
    switch (kind) {
      case Kind::VolumePower:
        if (!(alpha > 0 && alpha < 1))
          throw ConfigError("volume-power phi needs alpha in (0,1)");
        if (beta < 0) throw ConfigError("phi log power must be >= 0");
        break;
      case Kind::VolumeInverse:
        if (beta < 0) throw ConfigError("phi log power must be >= 0");
        break;
      case Kind::RadiusPower:
        if (!(alpha > 0 && alpha <= 1))
          throw ConfigError("radius-power phi needs alpha in (0,1]");
        break;
      case Kind::RadiusLogOverR:
        break;
    }
  }

  static double logx(double x) { return std::log(x + 2.0); }

  double eval(double x) const {
    if (!(x >= 1)) throw DomainError("phi is evaluated at arguments >= 1");
    switch (kind) {
      case Kind::VolumePower: return C * std::pow(logx(x), beta) / std::pow(x, alpha);
      case Kind::VolumeInverse: return C * std::pow(logx(x), beta) / x;
      case Kind::RadiusPower: return C / std::pow(x, alpha);
      case Kind::RadiusLogOverR: return C * logx(x) / x;
    }
    throw ConfigError("unreachable phi kind");
  }

  // Grammar: pow:C:alpha[:beta] | inv:C[:beta] | rpow:C:alpha | rlog:C
  static PhiSpec parse(const std::string& s);
  std::string to_string() const;
};

inline PhiSpec PhiSpec::parse(const std::string& s) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t nxt = s.find(':', pos);
    if (nxt == std::string::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, nxt - pos));
    pos = nxt + 1;
  }
  auto num = [&](size_t i) {
    try {
      return std::stod(parts.at(i));
    } catch (const std::exception&) {
      throw ConfigError("bad phi spec: " + s);
    }
  };
  PhiSpec phi;
  if (parts.empty()) throw ConfigError("empty phi spec");
  if (parts[0] == "pow" && (parts.size() == 3 || parts.size() == 4)) {
    phi.kind = Kind::VolumePower;
    phi.C = num(1);
    phi.alpha = num(2);
    phi.beta = parts.size() == 4 ? num(3) : 0.0;
  } else if (parts[0] == "inv" && (parts.size() == 2 || parts.size() == 3)) {
    phi.kind = Kind::VolumeInverse;
    phi.C = num(1);
    phi.beta = parts.size() == 3 ? num(2) : 0.0;
  } else if (parts[0] == "rpow" && parts.size() == 3) {
    phi.kind = Kind::RadiusPower;
    phi.C = num(1);
    phi.alpha = num(2);
  } else if (parts[0] == "rlog" && parts.size() == 2) {
    phi.kind = Kind::RadiusLogOverR;
    phi.C = num(1);
  } else {
    throw ConfigError("bad phi spec: " + s +
                      " (expected pow:C:a[:b], inv:C[:b], rpow:C:a, rlog:C)");
  }
  phi.validate();
  return phi;
}

inline std::string PhiSpec::to_string() const {
  char buf[128];
  switch (kind) {
    case Kind::VolumePower:
      std::snprintf(buf, sizeof buf, "pow:%g:%g:%g", C, alpha, beta);
      break;
    case Kind::VolumeInverse:
      std::snprintf(buf, sizeof buf, "inv:%g:%g", C, beta);
      break;
    case Kind::RadiusPower:
      std::snprintf(buf, sizeof buf, "rpow:%g:%g", C, alpha);
      break;
    case Kind::RadiusLogOverR:
      std::snprintf(buf, sizeof buf, "rlog:%g", C);
      break;
  }
  return buf;
}

// I_phi(s,t) = sum_{j=0}^{t-1} phi(s+j): expected number of attachments that
// a volume-indexed ansatz allows to any fixed vertex while the set grows from
// volume s to s+t.
inline double i_phi(const PhiSpec& phi, int64_t s, int64_t t) {
  if (!phi.volume_indexed())
    throw DomainError("i_phi needs a volume-indexed phi");
  if (s < 1) throw DomainError("i_phi needs s >= 1");
  if (t < 0) throw DomainError("i_phi needs t >= 0");
  double acc = 0;
  for (int64_t j = 0; j < t; ++j) acc += phi.eval(static_cast<double>(s + j));
  return acc;
}

// Exact Poisson-binomial upper tail P[X >= n] for independent Bernoullis.
inline double poisson_binomial_tail(const std::vector<double>& probs,
                                    int64_t n) {
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError("bernoulli probabilities must lie in [0,1]");
  if (n <= 0) return 1.0;
  if (n > static_cast<int64_t>(probs.size())) return 0.0;
  std::vector<double> dp(probs.size() + 1, 0.0);
  dp[0] = 1.0;
  size_t hi = 0;
  for (double p : probs) {
    ++hi;
    for (size_t j = hi; j >= 1; --j) dp[j] = dp[j] * (1 - p) + dp[j - 1] * p;
    dp[0] *= (1 - p);
  }
  double tail = 0;
  for (size_t j = static_cast<size_t>(n); j < dp.size(); ++j) tail += dp[j];
  return std::min(1.0, tail);
}

// Chernoff tail for a Poisson-binomial with mean mu:
// P[X >= n] <= exp(-mu) (e mu / n)^n for n > mu (trivial bound 1 otherwise).
inline double large_deviation_tail(double mu, int64_t n) {
  if (mu < 0) throw DomainError("mean must be non-negative");
  if (n <= mu) return 1.0;
  if (mu == 0) return 0.0;
  double nn = static_cast<double>(n);
  return std::exp(-mu + nn * (1.0 + std::log(mu / nn)));
}

// Window-counting bound: probability that a set of volume s gains at least n
// particles in t steps while every harmonic value obeys the ansatz. The
// counting factor s (choices of attachment root) times (D e I / n)^n
// (connected supersets discounted by the Chernoff tail) gives
//   raw = s * exp(n * log(D e I / n)),
// where I = I_phi(s,t) for volume ansatz or phi(rad) * t for radius ansatz.
struct FillBound {
  double intensity = 0;  // I in the formula above
  double raw = 0;        // unclamped bound value
  double prob = 0;       // min(raw, 1)
};

inline FillBound fill_bound_from_intensity(int64_t s, int64_t n, int max_degree,
                                           double intensity) {
  if (n < 1) throw DomainError("fill bound needs n >= 1");
  if (s < n) throw DomainError("fill bound needs s >= n");
  if (max_degree < 2) throw DomainError("fill bound needs max degree >= 2");
  FillBound out;
  out.intensity = intensity;
  double nn = static_cast<double>(n);
  double log_raw =
      std::log(static_cast<double>(s)) +
      nn * (std::log(static_cast<double>(max_degree)) + 1.0 +
            std::log(std::max(intensity, 1e-300)) - std::log(nn));
  out.raw = std::exp(log_raw);
  out.prob = std::min(1.0, out.raw);
  return out;
}

inline FillBound fill_in_order_bound(const PhiSpec& phi, int64_t s, int64_t t,
                                     int64_t n, int max_degree) {
  if (t < 1) throw DomainError("fill bound needs t >= 1");
  if (!phi.volume_indexed())
    throw DomainError("volume fill bound needs a volume-indexed phi");
  return fill_bound_from_intensity(s, n, max_degree, i_phi(phi, s, t));
}

inline FillBound fill_in_order_bound_radius(const PhiSpec& phi, int64_t s,
                                            int64_t rad_s, int64_t t, int64_t n,
                                            int max_degree) {
  if (t < 1) throw DomainError("fill bound needs t >= 1");
  if (rad_s < 1) throw DomainError("radius fill bound needs rad >= 1");
  if (phi.volume_indexed())
    throw DomainError("radius fill bound needs a radius-indexed phi");
  double intensity = phi.eval(static_cast<double>(rad_s)) * static_cast<double>(t);
  return fill_bound_from_intensity(s, n, max_degree, intensity);
}

// Radius envelope f(t) = t^power * log(t)^log_power (eval needs t >= 3).
struct EnvelopeSpec {
  double power = 0;
  double log_power = 0;
  std::string label;
  std::string source;

  double eval(double t) const {
    if (!(t >= 3)) throw DomainError("envelope evaluated at t >= 3 only");
    return std::pow(t, power) * std::pow(std::log(t), log_power);
  }
};

namespace detail {

inline std::string envelope_label(double power, double log_power) {
  char buf[64];
  if (log_power == 0)
    std::snprintf(buf, sizeof buf, "t^%.6g", power);
  else if (power == 0)
    std::snprintf(buf, sizeof buf, "(log t)^%.6g", log_power);
  else
    std::snprintf(buf, sizeof buf, "t^%.6g (log t)^%.6g", power, log_power);
  return buf;
}

}  // namespace detail

// Intrinsic dimension of the n-dimensional pre-fractal carpet, from the cell
// counts 3^n - 1 per subdivision:
//   d(n) = log(3^n - 1) / (log(3^n - 1) - log(3^(n-1) - 1)).
inline double carpet_dimension(int n) {
  if (n < 2) throw DomainError("carpet dimension defined for n >= 2");
  double big = std::pow(3.0, n) - 1.0;
  double small = std::pow(3.0, n - 1) - 1.0;
  return std::log(big) / (std::log(big) - std::log(small));
}

// Spectral gap of the simple walk on the k-regular tree.
inline double tree_spectral_gap(int k) {
  if (k < 3) throw DomainError("tree spectral gap needs k >= 3");
  return 1.0 - 2.0 * std::sqrt(static_cast<double>(k - 1)) / k;
}

// Growth envelope implied by a volume-indexed ansatz: phi(s)=C L^b/s^a gives
// rad(A_t) = O(t^(1-a) L(t)^b); phi(s)=C L^b/s gives O(L(t)^(b+1)).
inline EnvelopeSpec kesten_volume_envelope(const PhiSpec& phi) {
  phi.validate();
  if (!phi.volume_indexed())
    throw DomainError("volume envelope needs a volume-indexed phi");
  EnvelopeSpec env;
  if (phi.kind == PhiSpec::Kind::VolumePower) {
    env.power = 1.0 - phi.alpha;
    env.log_power = phi.beta;
  } else {
    env.power = 0.0;
    env.log_power = phi.beta + 1.0;
  }
  env.label = detail::envelope_label(env.power, env.log_power);
  env.source = "volume ansatz " + phi.to_string();
  return env;
}

// Growth envelope implied by a radius-indexed ansatz: phi(r)=C/r^a gives
// rad(A_t) = O(t^(1/(1+a))); phi(r)=C L(r)/r gives O(sqrt(t log t)).
inline EnvelopeSpec kesten_radius_envelope(const PhiSpec& phi) {
  phi.validate();
  if (phi.volume_indexed())
    throw DomainError("radius envelope needs a radius-indexed phi");
  EnvelopeSpec env;
  if (phi.kind == PhiSpec::Kind::RadiusPower) {
    env.power = 1.0 / (1.0 + phi.alpha);
    env.log_power = 0.0;
  } else {
    env.power = 0.5;
    env.log_power = 0.5;
  }
  env.label = detail::envelope_label(env.power, env.log_power);
  env.source = "radius ansatz " + phi.to_string();
  return env;
}

// Best-known growth envelopes per family tag. Accepts z<d> (d>=3), tree<k>,
// carpet<n> (n>=3), perc:<d>:... (same as z<d>), and the literal "pinched"
// (pinched exponential-growth regime). Recurrent families have no envelope.
inline EnvelopeSpec envelope_for(const std::string& family) {
  auto make = [](double p, double lp, const std::string& src) {
    EnvelopeSpec env;
    env.power = p;
    env.log_power = lp;
    env.label = detail::envelope_label(p, lp);
    env.source = src;
    return env;
  };
  auto int_suffix = [&](size_t at) {
    const std::string digits = family.substr(at);
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad family tag: " + family);
    return std::stoi(digits);
  };
  if (family == "pinched")
    return make(0.0, 4.0, "pinched exponential growth profile");
  if (family.rfind("perc:", 0) == 0) {
    size_t c = family.find(':', 5);
    int d = std::stoi(family.substr(5, c - 5));
    if (d == 3) return make(0.5, 0.5, "supercritical percolation, 3 dims");
    if (d >= 4)
      return make(2.0 / d, 0.0, "supercritical percolation, " +
                                    std::to_string(d) + " dims");
    throw DomainError("no envelope for percolation in d < 3");
  }
  if (family.rfind("tree", 0) == 0) {
    int k = int_suffix(4);
    if (k < 3) throw DomainError("no envelope for tree branching < 3");
    return make(0.0, 1.0, "regular tree, branching " + std::to_string(k));
  }
  if (family.rfind("carpet", 0) == 0) {
    int n = int_suffix(6);
    if (n < 3)
      throw DomainError("no envelope for the recurrent 2-dim carpet");
    if (n == 3) {
      double beta = (std::log2(13.0) - 2.0) / 3.0;
      return make(beta, 0.0, "3-dim carpet, exponent (log2 13 - 2)/3");
    }
    if (n == 4) return make(0.5, 0.0, "4-dim carpet");
    double d = carpet_dimension(n);
    return make(2.0 / (d - 2.0), 1.0,
                std::to_string(n) + "-dim carpet, dimension " +
                    std::to_string(d));
  }
  if (family.rfind("z", 0) == 0) {
    int d = int_suffix(1);
    if (d < 3) throw DomainError("no envelope for the recurrent lattice d < 3");
    if (d == 3) return make(0.5, 0.5, "lattice, 3 dims");
    return make(2.0 / d, 0.0, "lattice, " + std::to_string(d) + " dims");
  }
  throw ConfigError("unknown family tag for envelope: " + family);
}

}  // namespace dla
