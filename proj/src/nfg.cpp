#include "bethe/nfg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bethe/parallel.hpp"
#include "bethe/summation.hpp"

namespace bethe {

LocalFunctionTable::LocalFunctionTable(std::size_t arity, std::vector<double> values, bool transformed)
    : arity_(arity), values_(std::move(values)), transformed_(transformed) {
  if (arity_ >= 8 * sizeof(std::size_t) || values_.size() != (std::size_t{1} << arity_)) {
    throw ValidationError("table of arity " + std::to_string(arity_) + " needs 2^" +
                          std::to_string(arity_) + " entries, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("table entries must be finite");
    if (!transformed_ && v < 0.0) {
      throw ValidationError("negative entry in an untransformed local function");
    }
  }
}

LocalFunctionTable LocalFunctionTable::constant(std::size_t arity, double value) {
  return LocalFunctionTable(arity, std::vector<double>(std::size_t{1} << arity, value), value < 0.0);
}

std::size_t LocalFunctionTable::index_of(std::span<const std::uint8_t> args) noexcept {
  std::size_t idx = 0;
  for (auto a : args) idx = (idx << 1) | (a & 1u);
  return idx;
}

std::size_t Nfg::full_edge_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.kind == EdgeKind::full; }));
}

std::optional<std::size_t> Nfg::find_node(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Nfg::find_edge(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return i;
  }
  return std::nullopt;
}

Nfg Nfg::with_tables(std::vector<LocalFunctionTable> tables) const {
  if (tables.size() != nodes_.size()) throw ValidationError("table count does not match node count");
  std::vector<Node> nodes = nodes_;
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].table = std::move(tables[i]);
  return Nfg(std::move(nodes), edges_);
}

std::size_t NfgBuilder::add_node(std::string id, LocalFunctionTable table) {
  const std::size_t ports = table.arity();
  nodes_.push_back(Node{std::move(id), ports, std::move(table)});
  return nodes_.size() - 1;
}

std::size_t NfgBuilder::add_full_edge(std::string id, Endpoint a, Endpoint b) {
  edges_.push_back(Edge{std::move(id), EdgeKind::full, {a, b}});
  return edges_.size() - 1;
}

std::size_t NfgBuilder::add_half_edge(std::string id, Endpoint a) {
  edges_.push_back(Edge{std::move(id), EdgeKind::half, {a}});
  return edges_.size() - 1;
}

std::vector<Violation> validate_nfg(const Nfg& nfg) {
  std::vector<Violation> out;
  std::set<std::string> node_ids;
  std::set<std::string> edge_ids;
  std::vector<std::vector<int>> covered(nfg.node_count());

  for (const Node& n : nfg.nodes()) {
    if (!node_ids.insert(n.id).second) out.push_back({n.id, "duplicate node id"});
    if (n.ports != n.table.arity()) {
      out.push_back({n.id, "arity mismatch: " + std::to_string(n.ports) + " ports but a " +
                               std::to_string(n.table.arity()) + "-ary table"});
    }
  }
  for (std::size_t i = 0; i < nfg.node_count(); ++i) covered[i].assign(nfg.node(i).ports, 0);

  for (const Edge& e : nfg.edges()) {
    if (!edge_ids.insert(e.id).second) out.push_back({e.id, "duplicate edge id"});
    if (e.kind == EdgeKind::full && e.ends.size() != 2) {
      out.push_back({e.id, "full edge needs two endpoints"});
    }
    if (e.kind == EdgeKind::half && e.ends.size() != 1) {
      out.push_back({e.id, "half edge needs exactly one endpoint"});
    }
    for (const Endpoint& end : e.ends) {
      if (end.node >= nfg.node_count()) {
        out.push_back({e.id, "endpoint names unknown node " + std::to_string(end.node)});
        continue;
      }
      if (end.port >= covered[end.node].size()) {
        out.push_back({e.id, "endpoint names port " + std::to_string(end.port) + " of node " +
                                 nfg.node(end.node).id + ", which has " +
                                 std::to_string(covered[end.node].size()) + " ports"});
        continue;
      }
      ++covered[end.node][end.port];
    }
  }
  for (std::size_t i = 0; i < nfg.node_count(); ++i) {
    for (std::size_t p = 0; p < covered[i].size(); ++p) {
      if (covered[i][p] == 0) {
        out.push_back({nfg.node(i).id, "port " + std::to_string(p) + " is not covered by any edge"});
      } else if (covered[i][p] > 1) {
        out.push_back({nfg.node(i).id, "port " + std::to_string(p) + " is covered by " +
                                           std::to_string(covered[i][p]) + " edge endpoints"});
      }
    }
  }
  return out;
}

void require_valid(const Nfg& nfg) {
  const auto violations = validate_nfg(nfg);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid NFG:";
  for (const auto& v : violations) msg << "\n  " << v.subject << ": " << v.message;
  throw ValidationError(msg.str());
}

std::vector<std::vector<std::size_t>> port_edges(const Nfg& nfg) {
  std::vector<std::vector<std::size_t>> out(nfg.node_count());
  for (std::size_t i = 0; i < nfg.node_count(); ++i) out[i].assign(nfg.node(i).ports, 0);
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    for (const Endpoint& end : nfg.edge(e).ends) out.at(end.node).at(end.port) = e;
  }
  return out;
}

Nfg disjoint_union(const Nfg& a, const Nfg& b) {
  std::vector<Node> nodes = a.nodes();
  std::vector<Edge> edges = a.edges();
  const std::size_t offset = nodes.size();
  for (Node n : b.nodes()) {
    n.id += "'";
    nodes.push_back(std::move(n));
  }
  for (Edge e : b.edges()) {
    e.id += "'";
    for (Endpoint& end : e.ends) end.node += offset;
    edges.push_back(std::move(e));
  }
  return Nfg(std::move(nodes), std::move(edges));
}

Configuration Configuration::from_mask(std::size_t edge_count, std::uint64_t mask) {
  Configuration cfg(edge_count);
  for (std::size_t e = 0; e < edge_count; ++e) cfg.assign(e, (mask >> e) & 1u);
  return cfg;
}

Configuration Configuration::from_map(const Nfg& nfg, const std::map<std::string, int>& values) {
  Configuration cfg(nfg.edge_count());
  for (const auto& [id, v] : values) {
    const auto e = nfg.find_edge(id);
    if (!e) throw ValidationError("configuration names unknown edge " + id);
    if (v != 0 && v != 1) throw ValidationError("edge " + id + " must take value 0 or 1");
    cfg.assign(*e, v == 1);
  }
  return cfg;
}

std::optional<bool> Configuration::value(std::size_t edge) const {
  const auto b = bits_.at(edge);
  if (b < 0) return std::nullopt;
  return b == 1;
}

double evaluate_global(const Nfg& nfg, const Configuration& cfg) {
  require_valid(nfg);
  if (cfg.size() != nfg.edge_count()) throw ValidationError("configuration size does not match edge count");
  for (std::size_t e = 0; e < nfg.edge_count(); ++e) {
    if (!cfg.value(e)) throw ValidationError("edge " + nfg.edge(e).id + " is unassigned");
  }
  const auto ports = port_edges(nfg);
  double g = 1.0;
  for (std::size_t i = 0; i < nfg.node_count(); ++i) {
    std::size_t idx = 0;
    for (std::size_t e : ports[i]) idx = (idx << 1) | (*cfg.value(e) ? 1u : 0u);
    g *= nfg.node(i).table.at(idx);
  }
  return g;
}

namespace {

// Enumeration split: the low `low_bits` edges vary inside a block, the rest
// select the block. Each node's table index is hi_offset(block) +
// lo_offset(low); lo offsets are tabulated once.
struct CompiledSum {
  std::size_t low_bits = 0;
  std::size_t high_bits = 0;
  std::vector<const LocalFunctionTable*> tables;
  // (edge - low_bits, weight) for ports on high edges
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> high_ports;
  std::vector<std::size_t> pure_high;  // nodes with no low port, node order
  std::vector<std::size_t> mixed;      // nodes with a low port, node order
  std::vector<std::vector<std::uint32_t>> lo_offsets;  // indexed like `mixed`

  double block_sum(std::uint64_t block) const {
    const std::size_t low_count = std::size_t{1} << low_bits;
    std::vector<std::size_t> hi(tables.size(), 0);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      for (auto [bit, w] : high_ports[i]) {
        if ((block >> bit) & 1u) hi[i] += w;
      }
    }
    double base = 1.0;
    for (std::size_t i : pure_high) base *= tables[i]->values()[hi[i]];
    if (base == 0.0) return 0.0;
    std::vector<double> prod(low_count, base);
    for (std::size_t k = 0; k < mixed.size(); ++k) {
      const double* t = tables[mixed[k]]->values().data() + hi[mixed[k]];
      const std::uint32_t* lo = lo_offsets[k].data();
      for (std::size_t low = 0; low < low_count; ++low) prod[low] *= t[lo[low]];
    }
    return compensated_sum(prod);
  }
};

}  // namespace

double partition_sum(const Nfg& nfg, const EnumerationLimits& limits) {
  require_valid(nfg);
  const std::size_t n = nfg.edge_count();
  if (n > limits.max_edges || n > 62) {
    throw InfeasibleError("too large for exhaustive enumeration: " + std::to_string(n) +
                          " edges exceeds the cap of " + std::to_string(limits.max_edges));
  }
  CompiledSum c;
  c.low_bits = std::min<std::size_t>(n, 12);
  c.high_bits = n - c.low_bits;
  const std::size_t low_count = std::size_t{1} << c.low_bits;
  const auto ports = port_edges(nfg);
  c.high_ports.resize(nfg.node_count());
  for (std::size_t i = 0; i < nfg.node_count(); ++i) {
    c.tables.push_back(&nfg.node(i).table);
    const std::size_t arity = ports[i].size();
    std::vector<std::pair<std::size_t, std::size_t>> low_ports;
    for (std::size_t p = 0; p < arity; ++p) {
      const std::size_t w = std::size_t{1} << (arity - 1 - p);
      const std::size_t e = ports[i][p];
      if (e < c.low_bits) {
        low_ports.emplace_back(e, w);
      } else {
        c.high_ports[i].emplace_back(e - c.low_bits, w);
      }
    }
    if (low_ports.empty()) {
      c.pure_high.push_back(i);
      continue;
    }
    c.mixed.push_back(i);
    std::vector<std::uint32_t> lo(low_count, 0);
    for (std::size_t low = 0; low < low_count; ++low) {
      std::uint32_t off = 0;
      for (auto [e, w] : low_ports) {
        if ((low >> e) & 1u) off += static_cast<std::uint32_t>(w);
      }
      lo[low] = off;
    }
    c.lo_offsets.push_back(std::move(lo));
  }
  const std::size_t blocks = std::size_t{1} << c.high_bits;
  const auto sums = ordered_map<double>(blocks, [&](std::size_t b) { return c.block_sum(b); });
  return compensated_sum(sums);
}

}  // namespace bethe
