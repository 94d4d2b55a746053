#pragma once

// Normal factor graphs over the binary alphabet. Variables live on edges;
// every function node carries a dense table indexed by the bit-packed tuple
// of its port values, port 0 being the most significant bit.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/error.hpp"

namespace bethe {

class LocalFunctionTable {
 public:
  /// Throws ValidationError unless values.size() == 2^arity and, for
  /// untransformed tables, every entry is nonnegative.
  LocalFunctionTable(std::size_t arity, std::vector<double> values, bool transformed = false);

  static LocalFunctionTable constant(std::size_t arity, double value);

  [[nodiscard]] std::size_t arity() const noexcept { return arity_; }
  [[nodiscard]] bool transformed() const noexcept { return transformed_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double at(std::size_t index) const { return values_.at(index); }
  [[nodiscard]] double at(std::span<const std::uint8_t> args) const { return at(index_of(args)); }
  double operator()(std::initializer_list<std::uint8_t> args) const {
    return at(std::span<const std::uint8_t>(args.begin(), args.size()));
  }

  /// Bit-packed index of a tuple; args[0] is the most significant bit.
  static std::size_t index_of(std::span<const std::uint8_t> args) noexcept;

  bool operator==(const LocalFunctionTable&) const = default;

 private:
  std::size_t arity_;
  std::vector<double> values_;
  bool transformed_;
};

enum class EdgeKind { full, half };

struct Endpoint {
  std::size_t node;
  std::size_t port;
  auto operator<=>(const Endpoint&) const = default;
};

struct Node {
  std::string id;
  std::size_t ports;
  LocalFunctionTable table;
};

struct Edge {
  std::string id;
  EdgeKind kind;
  std::vector<Endpoint> ends;
};

/// Structural problem found by validate_nfg; `subject` names the node or edge.
struct Violation {
  std::string subject;
  std::string message;
};

class Nfg {
 public:
  Nfg() = default;
  Nfg(std::vector<Node> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {}

  [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] const Node& node(std::size_t i) const { return nodes_.at(i); }
  [[nodiscard]] const Edge& edge(std::size_t i) const { return edges_.at(i); }
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
  [[nodiscard]] std::size_t full_edge_count() const noexcept;

  [[nodiscard]] std::optional<std::size_t> find_node(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> find_edge(std::string_view id) const;

  /// Same incidence, node tables replaced. Throws if the count differs.
  [[nodiscard]] Nfg with_tables(std::vector<LocalFunctionTable> tables) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

/// Incremental construction; node ports default to the table arity.
class NfgBuilder {
 public:
  std::size_t add_node(std::string id, LocalFunctionTable table);
  std::size_t add_full_edge(std::string id, Endpoint a, Endpoint b);
  std::size_t add_half_edge(std::string id, Endpoint a);
  [[nodiscard]] Nfg build() const { return Nfg(nodes_, edges_); }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

[[nodiscard]] std::vector<Violation> validate_nfg(const Nfg& nfg);

/// Throws ValidationError carrying every violation when nfg is invalid.
void require_valid(const Nfg& nfg);

/// For each node, the edge attached to each port (index = port).
[[nodiscard]] std::vector<std::vector<std::size_t>> port_edges(const Nfg& nfg);

/// Disjoint union; ids of the second graph are suffixed to stay unique.
[[nodiscard]] Nfg disjoint_union(const Nfg& a, const Nfg& b);

class Configuration {
 public:
  explicit Configuration(std::size_t edge_count) : bits_(edge_count, -1) {}

  /// Edge i takes bit i of `mask`.
  static Configuration from_mask(std::size_t edge_count, std::uint64_t mask);
  /// Assignment by edge id; unknown ids throw ValidationError.
  static Configuration from_map(const Nfg& nfg, const std::map<std::string, int>& values);

  void assign(std::size_t edge, bool value) { bits_.at(edge) = value ? 1 : 0; }
  [[nodiscard]] std::optional<bool> value(std::size_t edge) const;
  [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }

 private:
  std::vector<std::int8_t> bits_;
};

/// Product over nodes of the table entry at the restriction of cfg.
/// Throws ValidationError if an edge is unassigned.
[[nodiscard]] double evaluate_global(const Nfg& nfg, const Configuration& cfg);

struct EnumerationLimits {
  std::size_t max_edges = 26;
};

/// Exhaustive sum of the global function over all 2^n configurations.
/// Configurations are visited in increasing mask order (edge i = bit i) with
/// compensated accumulation; the result is independent of the thread count.
[[nodiscard]] double partition_sum(const Nfg& nfg, const EnumerationLimits& limits = {});

}  // namespace bethe
