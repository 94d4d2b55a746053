#pragma once

// Loop-calculus transform of the f0 class at the symmetric fixed point
// Lambda0 = 1 (theta >= 1/5), cycle-code enumeration over GF(2), and the
// loop-series decomposition Z = Z_Bethe * (1 + sum_{c != 0} r^{w(c)}),
// r = (2 - 2 theta) / (2 + 6 theta).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bethe/models.hpp"
#include "bethe/nfg.hpp"

namespace bethe {

struct LctModel {
  F0Model base;
  double theta;
  LocalFunctionTable node_table;  // transformed
  double alpha;                   // (2 + 6 theta) / sqrt(8)
  double beta;                    // (2 - 2 theta) / sqrt(8)
  Nfg transformed;                // base incidence, every table replaced by node_table
};

/// The transformed node table: alpha at 000, beta at 011/101/110, 0 elsewhere.
[[nodiscard]] LocalFunctionTable lct_node_table(double theta);

/// Throws ValidationError("LCT closed form available only for theta >= 1/5")
/// below the phase transition, and on an invalid incidence matrix.
[[nodiscard]] LctModel build_lct_model(double theta, const IncidenceMatrix& h);

struct CycleCodeword {
  std::vector<std::uint8_t> bits;
  std::size_t weight;
  bool operator==(const CycleCodeword&) const = default;
};

enum class CodewordSearch { automatic, elimination, scan };

/// Rank of h over GF(2).
[[nodiscard]] std::size_t gf2_rank(const IncidenceMatrix& h);

/// Every x with h x = 0 over GF(2), sorted lexicographically by bits (column
/// 0 first). `scan` tests all 2^n vectors; `elimination` spans a nullspace
/// basis; `automatic` scans for n <= 20.
[[nodiscard]] std::vector<CycleCodeword> enumerate_cycle_codewords(const IncidenceMatrix& h,
                                                                   CodewordSearch search = CodewordSearch::automatic);

/// A_w, the number of codewords of each weight w = 0..n.
[[nodiscard]] std::vector<std::size_t> weight_enumerator(const std::vector<CycleCodeword>& codewords, std::size_t n);

/// g_LCT of a codeword of weight w: ((2 + 6 theta)/sqrt(8))^m ((2 - 2 theta)/(2 + 6 theta))^w.
[[nodiscard]] double glct_of_weight(double theta, std::size_t m, std::size_t w);

struct LoopSeries {
  double z_bethe;
  double correction;  // sum over nonzero codewords of r^{w}
  double z;           // z_bethe * (1 + correction)
  std::vector<std::size_t> weight_enumerator;
};

[[nodiscard]] LoopSeries loop_series_decomposition(double theta, const IncidenceMatrix& h);

}  // namespace bethe
