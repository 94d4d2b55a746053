#pragma once

// Double-cover transform for degree-3 binary nodes. Each edge variable
// becomes a pair state in {(0,0), (0,1), (1,0), (1,1)}, written 0, 0^, 1^, 3
// below; the partition sum of the transformed model over the pair states
// other than (1,0) is the average of Z over all 2-covers, (Z_{Bethe,2})^2.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/models.hpp"
#include "bethe/nfg.hpp"

namespace bethe {

enum class PairState : std::uint8_t { zero_zero = 0, zero_one = 1, one_zero = 2, one_one = 3 };

inline constexpr PairState kHatZero = PairState::zero_one;  // (0,1)
inline constexpr PairState kHatOne = PairState::one_zero;   // (1,0)

[[nodiscard]] std::string_view pair_state_name(PairState s) noexcept;

enum class DctStage { general, post_lct, pruned, alpha_beta };

[[nodiscard]] std::string_view dct_stage_name(DctStage s) noexcept;
/// Throws ValidationError on an unknown name.
[[nodiscard]] DctStage parse_dct_stage(std::string_view name);

/// 4x4x4 array; at(a, b, c) has a = first argument (row), b = second
/// (column), c = third (block).
class DctTable {
 public:
  DctTable(std::array<double, 64> values, DctStage provenance) : values_(values), provenance_(provenance) {}

  [[nodiscard]] double at(std::size_t a, std::size_t b, std::size_t c) const { return values_.at(16 * a + 4 * b + c); }
  [[nodiscard]] double at(PairState a, PairState b, PairState c) const {
    return at(static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c));
  }
  [[nodiscard]] const std::array<double, 64>& values() const noexcept { return values_; }
  [[nodiscard]] DctStage provenance() const noexcept { return provenance_; }

 private:
  std::array<double, 64> values_;
  DctStage provenance_;
};

/// Entry-by-entry: products t_{abc} t_{a'b'c'}, sqrt(2)-scaled cross terms,
/// permanents and determinants of the conditional 2x2 matrices, and the four
/// signed combinations gamma (t000 t111 +- t100 t011 +- t010 t101 +- t001 t110),
/// gamma = 1/sqrt(2). Throws ValidationError unless f has arity 3.
[[nodiscard]] DctTable dct_table_general(const LocalFunctionTable& f);

/// General table for an LCT output; throws unless t100 = t010 = t001 = 0.
[[nodiscard]] DctTable dct_table_post_lct(const LocalFunctionTable& f);

/// Zeroes every entry with an argument equal to (1,0).
[[nodiscard]] DctTable prune_dct_table(const DctTable& t);

/// Final table for the transformed f0 node: alpha^2, alpha beta (three
/// rotations), beta^2 (six placements), zero elsewhere.
[[nodiscard]] DctTable dct_table_alpha_beta(double theta);

/// Four blocks (third argument), rows = first argument, columns = second.
[[nodiscard]] std::string format_dct_table(const DctTable& t);

struct DctNfg {
  Nfg base;
  std::vector<DctTable> tables;  // one per node
};

/// dct_table_general of every node, pruned when stage == pruned (only
/// general, post_lct and pruned are meaningful here). Throws
/// ValidationError unless every node has degree 3 and every edge is full.
[[nodiscard]] DctNfg make_dct_nfg(const Nfg& nfg, DctStage stage = DctStage::pruned);

enum class PairDomain { full4, pruned3 };

/// Sum over pair-state configurations of the product of node tables;
/// pruned3 restricts every edge to {(0,0), (0,1), (1,1)}.
[[nodiscard]] double dct_partition_sum(const DctNfg& dnfg, PairDomain domain, std::size_t max_edges = 14);

/// Z_{Bethe,2} of the f0 model with incidence h via its loop-calculus
/// transform; theta >= 1/5. Throws Error on a negative sum.
[[nodiscard]] double z_bethe2_via_dct(double theta, const IncidenceMatrix& h);

/// Z_{Bethe,2} of any degree-3 NFG from the general tables of its own nodes.
[[nodiscard]] double z_bethe2_via_dct(const Nfg& nfg);

/// Table-versus-oracle differ: the pair-state sums beside the exhaustive
/// 2-cover average and the trivial-cover value Z^2.
struct DctOracleReport {
  double pruned3;
  double full4;
  double cover_mean;
  double z_squared;
  double pruned3_vs_covers;  // relative differences
  double full4_vs_covers;
  double full4_vs_z_squared;
};

[[nodiscard]] DctOracleReport dct_oracle_report(const Nfg& nfg, DctStage stage = DctStage::general);

}  // namespace bethe
