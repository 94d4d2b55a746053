#include "bethe/covers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bethe/summation.hpp"

namespace bethe {

namespace {

bool is_bijection(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (auto v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation identity_perm(std::size_t m) {
  Permutation p(m);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

double factorial(std::size_t m) {
  double f = 1.0;
  for (std::size_t i = 2; i <= m; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

void check_cover_spec(const Nfg& nfg, const CoverSpec& spec) {
  if (spec.degree == 0) throw ValidationError("cover degree must be positive");
  if (spec.perms.size() != nfg.edge_count()) {
    throw ValidationError("cover spec lists " + std::to_string(spec.perms.size()) + " edges, NFG has " +
                          std::to_string(nfg.edge_count()));
  }
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    const auto& perm = spec.perms[e];
    if (nfg.edge(e).kind == EdgeKind::half) {
      if (!perm.empty()) throw ValidationError("half edge " + nfg.edge(e).id + " carries no permutation");
      continue;
    }
    if (perm.size() != spec.degree) {
      throw ValidationError("permutation of edge " + nfg.edge(e).id + " has size " + std::to_string(perm.size()) +
                            ", cover degree is " + std::to_string(spec.degree));
    }
    if (!is_bijection(perm)) throw ValidationError("permutation of edge " + nfg.edge(e).id + " is not a bijection");
  }
}

CoverSpec identity_cover(const Nfg& nfg, std::size_t degree) {
  CoverSpec spec{degree, std::vector<Permutation>(nfg.edge_count())};
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind == EdgeKind::full) spec.perms[e] = identity_perm(degree);
  }
  return spec;
}

Nfg build_cover(const Nfg& nfg, const CoverSpec& spec) {
  require_valid(nfg);
  check_cover_spec(nfg, spec);
  const std::size_t m = spec.degree;
  std::vector<Node> nodes;
  nodes.reserve(nfg.node_count() * m);
  for (const Node& v : nfg.nodes()) {
    for (std::size_t i = 0; i < m; ++i) nodes.push_back(Node{v.id + "#" + std::to_string(i + 1), v.ports, v.table});
  }
  std::vector<Edge> edges;
  edges.reserve(nfg.edge_count() * m);
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    const Edge& base = nfg.edge(e);
    for (std::size_t i = 0; i < m; ++i) {
      Edge copy{base.id + "#" + std::to_string(i + 1), base.kind, {}};
      const Endpoint& a = base.ends[0];
      copy.ends.push_back(Endpoint{a.node * m + i, a.port});
      if (base.kind == EdgeKind::full) {
        const Endpoint& b = base.ends[1];
        copy.ends.push_back(Endpoint{b.node * m + spec.perms[e][i], b.port});
      }
      edges.push_back(std::move(copy));
    }
  }
  return Nfg(std::move(nodes), std::move(edges));
}

std::string format_cover_spec(const Nfg& nfg, const CoverSpec& spec) {
  check_cover_spec(nfg, spec);
  std::string out;
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind != EdgeKind::full) continue;
    if (!out.empty()) out += ", ";
    out += nfg.edge(e).id + ":(";
    for (std::size_t i = 0; i < spec.degree; ++i) {
      if (i) out += ' ';
      out += std::to_string(spec.perms[e][i] + 1);
    }
    out += ')';
  }
  return out;
}

CoverSpec parse_cover_spec(const Nfg& nfg, std::size_t degree, std::string_view text) {
  CoverSpec spec = identity_cover(nfg, degree);
  std::size_t pos = 0;
  auto skip_separators = [&] {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) ++pos;
  };
  for (skip_separators(); pos < text.size(); skip_separators()) {
    const auto colon = text.find(':', pos);
    if (colon == std::string_view::npos) throw ValidationError("cover spec: expected `edge-id:(...)`");
    const std::string id(text.substr(pos, colon - pos));
    const auto e = nfg.find_edge(id);
    if (!e) throw ValidationError("cover spec names unknown edge " + id);
    if (nfg.edge(*e).kind != EdgeKind::full) throw ValidationError("cover spec names half edge " + id);
    const auto open = colon + 1;
    const auto close = text.find(')', open);
    if (open >= text.size() || text[open] != '(' || close == std::string_view::npos) {
      throw ValidationError("cover spec: permutation of " + id + " must be parenthesized");
    }
    std::istringstream in{std::string(text.substr(open + 1, close - open - 1))};
    Permutation perm;
    long v = 0;
    while (in >> v) {
      if (v < 1) throw ValidationError("cover spec: permutation entries are one-based");
      perm.push_back(static_cast<std::uint32_t>(v - 1));
    }
    if (!in.eof()) throw ValidationError("cover spec: bad permutation entry for " + id);
    spec.perms[*e] = std::move(perm);
    pos = close + 1;
  }
  check_cover_spec(nfg, spec);
  return spec;
}

CoverEnumerator::CoverEnumerator(const Nfg& nfg, std::size_t degree) : spec_(identity_cover(nfg, degree)) {
  if (degree == 0) throw ValidationError("cover degree must be positive");
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind == EdgeKind::full) full_edges_.push_back(e);
  }
  count_ = std::pow(factorial(degree), static_cast<double>(full_edges_.size()));
}

bool CoverEnumerator::next() {
  for (auto it = full_edges_.rbegin(); it != full_edges_.rend(); ++it) {
    auto& perm = spec_.perms[*it];
    // next_permutation wraps back to the identity when it returns false
    if (std::next_permutation(perm.begin(), perm.end())) return true;
  }
  return false;
}

double cover_count(const Nfg& nfg, std::size_t degree) {
  return std::pow(factorial(degree), static_cast<double>(nfg.full_edge_count()));
}

std::vector<CoverSpec> enumerate_two_covers(const Nfg& nfg, const CoverLimits& limits) {
  require_valid(nfg);
  if (nfg.full_edge_count() > limits.max_two_cover_edges) {
    throw InfeasibleError("2-cover enumeration: " + std::to_string(nfg.full_edge_count()) +
                          " full edges exceeds the cap of " + std::to_string(limits.max_two_cover_edges));
  }
  std::vector<CoverSpec> out;
  CoverEnumerator it(nfg, 2);
  do {
    out.push_back(it.current());
  } while (it.next());
  return out;
}

CoverSpec random_cover(const Nfg& nfg, std::size_t degree, SplitMix64& rng) {
  CoverSpec spec{degree, std::vector<Permutation>(nfg.edge_count())};
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (nfg.edge(e).kind == EdgeKind::full) spec.perms[e] = random_permutation(static_cast<std::uint32_t>(degree), rng);
  }
  return spec;
}

namespace {

void check_per_cover(const Nfg& nfg, std::size_t degree, const CoverLimits& limits) {
  if (degree == 0) throw ValidationError("cover degree must be positive");
  const std::size_t edges = nfg.edge_count() * degree;
  if (edges > limits.per_cover.max_edges) {
    throw InfeasibleError("too large for exhaustive enumeration: a " + std::to_string(degree) + "-cover has " +
                          std::to_string(edges) + " edges, cap is " + std::to_string(limits.per_cover.max_edges));
  }
}

double root(double mean, std::size_t degree) {
  if (degree == 1) return mean;
  if (degree == 2) return std::sqrt(mean);
  return std::pow(mean, 1.0 / static_cast<double>(degree));
}

}  // namespace

DegreeMEstimate degree_m_bethe_exact(const Nfg& nfg, std::size_t degree, const CoverLimits& limits) {
  require_valid(nfg);
  check_per_cover(nfg, degree, limits);
  if (degree == 1) return DegreeMEstimate{partition_sum(nfg, limits.per_cover), 0.0, 1, 0, true};
  const double count = cover_count(nfg, degree);
  if (count > limits.max_covers) {
    throw InfeasibleError("exhaustive cover average needs " + std::to_string(count) + " covers (cap " +
                          std::to_string(limits.max_covers) + "); use the Monte-Carlo estimate instead");
  }
  CompensatedSum total;
  std::size_t visited = 0;
  CoverEnumerator it(nfg, degree);
  do {
    total.add(partition_sum(build_cover(nfg, it.current()), limits.per_cover));
    ++visited;
  } while (it.next());
  const double mean = total.value() / static_cast<double>(visited);
  return DegreeMEstimate{root(mean, degree), 0.0, visited, 0, true};
}

DegreeMEstimate degree_m_bethe_mc(const Nfg& nfg, std::size_t degree, std::size_t samples, std::uint64_t seed,
                                  const CoverLimits& limits) {
  require_valid(nfg);
  check_per_cover(nfg, degree, limits);
  if (samples < 2) throw ValidationError("Monte-Carlo estimate needs at least 2 samples");
  if (degree == 1) return DegreeMEstimate{partition_sum(nfg, limits.per_cover), 0.0, samples, seed, false};
  SplitMix64 rng(seed);
  std::vector<double> zs;
  zs.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    zs.push_back(partition_sum(build_cover(nfg, random_cover(nfg, degree, rng)), limits.per_cover));
  }
  const double n = static_cast<double>(samples);
  const double mean = compensated_sum(zs) / n;
  CompensatedSum sq;
  for (double z : zs) sq.add((z - mean) * (z - mean));
  const double sd = std::sqrt(sq.value() / (n - 1.0));
  const double se_mean = sd / std::sqrt(n);
  const double point = root(mean, degree);
  const double se = point / (static_cast<double>(degree) * mean) * se_mean;
  return DegreeMEstimate{point, se, samples, seed, false};
}

}  // namespace bethe
