#pragma once

#include <string>
#include <variant>
#include <vector>

#include "dla/errors.hpp"
#include "dla/graph/carpet.hpp"
#include "dla/graph/lattice.hpp"
#include "dla/graph/percolation.hpp"
#include "dla/graph/tree.hpp"

namespace dla {

using Family =
    std::variant<Lattice, RegularTree, PreSierpinskiCarpet, PercolationCluster>;

// Family grammar:
//   z<d>                      lattice, e.g. z3
//   tree<k>                   k-regular tree, e.g. tree3
//   carpet<n>                 pre-fractal carpet, e.g. carpet3
//   perc:<d>:<p>:<box>:<seed> percolation cluster, e.g. perc:3:0.7:20:1
inline Family parse_family(const std::string& s) {
  auto parse_int_suffix = [&](size_t prefix_len) -> int {
    const std::string digits = s.substr(prefix_len);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad family spec: " + s);
    return std::stoi(digits);
  };
  if (s.rfind("perc:", 0) == 0) {
    std::string rest = s.substr(5);
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t nxt = rest.find(':', pos);
      if (nxt == std::string::npos) {
        parts.push_back(rest.substr(pos));
        break;
      }
      parts.push_back(rest.substr(pos, nxt - pos));
      pos = nxt + 1;
    }
    if (parts.size() != 4)
      throw ConfigError("percolation spec needs perc:<d>:<p>:<box>:<seed>, got " + s);
    try {
      int d = std::stoi(parts[0]);
      double p = std::stod(parts[1]);
      int box = std::stoi(parts[2]);
      uint64_t seed = std::stoull(parts[3]);
      return PercolationCluster(d, p, box, seed);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad percolation spec: " + s);
    }
  }
  try {
    if (s.rfind("z", 0) == 0) return Lattice(parse_int_suffix(1));
    if (s.rfind("tree", 0) == 0) return RegularTree(parse_int_suffix(4));
    if (s.rfind("carpet", 0) == 0)
      return PreSierpinskiCarpet(parse_int_suffix(6));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad family spec: " + s);
  }
  throw ConfigError("unknown family spec: " + s +
                    " (expected z<d>, tree<k>, carpet<n>, or "
                    "perc:<d>:<p>:<box>:<seed>)");
}

inline std::string family_tag(const Family& fam) {
  return std::visit([](const auto& g) { return g.family_tag(); }, fam);
}

}  // namespace dla
