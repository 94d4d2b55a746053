#pragma once

// Reference computations for the tests, written independently of the
// library's fast paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "bethe/covers.hpp"
#include "bethe/nfg.hpp"
#include "bethe/rng.hpp"

namespace oracle {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Plain double loop over every configuration.
inline double brute_z(const bethe::Nfg& nfg) {
  const std::size_t n = nfg.edge_count();
  std::vector<std::vector<std::size_t>> port_edge(nfg.node_count());
  for (std::size_t v = 0; v < nfg.node_count(); ++v) port_edge[v].assign(nfg.node(v).ports, 0);
  for (std::size_t e = 0; e < n; ++e) {
    for (const auto& end : nfg.edge(e).ends) port_edge[end.node][end.port] = e;
  }
  long double total = 0.0L;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long double prod = 1.0L;
    for (std::size_t v = 0; v < nfg.node_count(); ++v) {
      std::size_t idx = 0;
      for (std::size_t p = 0; p < port_edge[v].size(); ++p) idx = idx << 1 | ((mask >> port_edge[v][p]) & 1u);
      prod *= nfg.node(v).table.at(idx);
    }
    total += prod;
  }
  return static_cast<double>(total);
}

/// Mean of Z over every M-cover, visiting permutations with std::next_permutation.
inline double cover_mean_brute(const bethe::Nfg& nfg, std::size_t m) {
  std::vector<std::size_t> full;
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind == bethe::EdgeKind::full) full.push_back(e);
  }
  bethe::Permutation id(m);
  std::iota(id.begin(), id.end(), 0u);
  bethe::CoverSpec spec{m, std::vector<bethe::Permutation>(nfg.edge_count())};
  for (std::size_t e : full) spec.perms[e] = id;
  long double total = 0.0L;
  std::size_t count = 0;
  for (;;) {
    total += brute_z(bethe::build_cover(nfg, spec));
    ++count;
    std::size_t k = full.size();
    while (k > 0) {
      auto& p = spec.perms[full[k - 1]];
      if (std::next_permutation(p.begin(), p.end())) break;
      --k;
    }
    if (k == 0) break;
  }
  return static_cast<double>(total / count);
}

/// Pair-state table of f by the change of basis Q on f (x) f:
/// (0,0) -> e00, (0,1) -> (e01 + e10)/sqrt2, (1,0) -> (e01 - e10)/sqrt2, (1,1) -> e11.
inline std::array<double, 64> holographic_dct(const bethe::LocalFunctionTable& f) {
  const double g = 1.0 / std::sqrt(2.0);
  // q[s][2x + x'] for pair state s
  const double q[4][4] = {{1, 0, 0, 0}, {0, g, g, 0}, {0, g, -g, 0}, {0, 0, 0, 1}};
  std::array<double, 64> out{};
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      for (std::size_t c = 0; c < 4; ++c) {
        double s = 0.0;
        for (std::size_t x = 0; x < 8; ++x) {
          for (std::size_t y = 0; y < 8; ++y) {
            const double w = q[a][2 * (x >> 2 & 1) + (y >> 2 & 1)] * q[b][2 * (x >> 1 & 1) + (y >> 1 & 1)] *
                             q[c][2 * (x & 1) + (y & 1)];
            s += w * f.at(x) * f.at(y);
          }
        }
        out[16 * a + 4 * b + c] = s;
      }
    }
  }
  return out;
}

/// Example graph with half edges e1, e4 and full edges e2, e3, e5..e8:
/// f1(e1,e2,e5) f2(e2,e3,e6) f3(e3,e4,e7) f4(e5,e6,e8) f5(e7,e8).
inline bethe::Nfg five_node_graph(std::uint64_t seed) {
  bethe::SplitMix64 rng(seed);
  auto table = [&](std::size_t arity) {
    std::vector<double> v(std::size_t{1} << arity);
    for (double& x : v) x = 0.1 + rng.unit();
    return bethe::LocalFunctionTable(arity, v);
  };
  bethe::NfgBuilder b;
  const auto f1 = b.add_node("f1", table(3));
  const auto f2 = b.add_node("f2", table(3));
  const auto f3 = b.add_node("f3", table(3));
  const auto f4 = b.add_node("f4", table(3));
  const auto f5 = b.add_node("f5", table(2));
  b.add_half_edge("e1", {f1, 0});
  b.add_full_edge("e2", {f1, 1}, {f2, 0});
  b.add_full_edge("e3", {f2, 1}, {f3, 0});
  b.add_half_edge("e4", {f3, 1});
  b.add_full_edge("e5", {f1, 2}, {f4, 0});
  b.add_full_edge("e6", {f2, 2}, {f4, 1});
  b.add_full_edge("e7", {f3, 2}, {f5, 0});
  b.add_full_edge("e8", {f4, 2}, {f5, 1});
  return b.build();
}

/// Random positive table of the given arity.
inline bethe::LocalFunctionTable random_table(std::size_t arity, bethe::SplitMix64& rng, double lo = 0.05) {
  std::vector<double> v(std::size_t{1} << arity);
  for (double& x : v) x = lo + rng.unit();
  return bethe::LocalFunctionTable(arity, v);
}

}  // namespace oracle
