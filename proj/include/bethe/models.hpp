#pragma once

// The two model families: the single-cycle NFG (one degree-2 node on a
// self-loop) and the f0 class of degree-3 log-supermodular models defined by
// a (2,3)-regular incidence matrix.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/nfg.hpp"

namespace bethe {

/// Dense binary matrix; rows are function nodes, columns are edges.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  IncidenceMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> data);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool at(std::size_t r, std::size_t c) const { return data_.at(r * cols_ + c) != 0; }
  /// Columns holding a one in row r, ascending.
  [[nodiscard]] std::vector<std::size_t> row_support(std::size_t r) const;
  /// Rows holding a one in column c, ascending.
  [[nodiscard]] std::vector<std::size_t> col_support(std::size_t c) const;

  bool operator==(const IncidenceMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

/// One row per line, entries 0/1 separated by whitespace; blank lines ignored.
[[nodiscard]] IncidenceMatrix parse_incidence(std::string_view text);
[[nodiscard]] std::string format_incidence(const IncidenceMatrix& h);
[[nodiscard]] IncidenceMatrix load_incidence(const std::filesystem::path& path);

/// The 8x12 matrix of the numerical study (also shipped as fixtures/appendix_d.txt).
[[nodiscard]] IncidenceMatrix appendix_d_incidence();
/// Two nodes sharing three edges.
[[nodiscard]] IncidenceMatrix theta_graph_incidence();
/// Complete graph on four nodes: m = 4, n = 6.
[[nodiscard]] IncidenceMatrix k4_incidence();

/// Row-major 2x2 table {T(0,0), T(0,1), T(1,0), T(1,1)}.
using Table2x2 = std::array<double, 4>;

[[nodiscard]] inline Table2x2 symmetric_table(double theta) { return {1.0, theta, theta, 1.0}; }

struct SingleCycleModel {
  Table2x2 table;
  double lambda1;  // Perron root
  double lambda2;
  double xi;       // lambda2 / lambda1
};

/// Checks strict positivity and computes the eigenvalues with the
/// cancellation-free quadratic formula.
[[nodiscard]] SingleCycleModel single_cycle_model(const Table2x2& t);

/// One node with table T and one full self-loop; port 0 is the first argument.
[[nodiscard]] Nfg single_cycle_nfg(const Table2x2& t);

struct ClosedForms {
  double z;
  double z_bethe2;
  double z_bethe;
};

/// (lambda1 + lambda2, sqrt(lambda1^2 + lambda1 lambda2 + lambda2^2), lambda1).
[[nodiscard]] ClosedForms single_cycle_closed_forms(const Table2x2& t);

/// z * z_bethe / z_bethe2^2. Throws ValidationError when z_bethe2 is zero.
[[nodiscard]] double rho(double z, double z_bethe2, double z_bethe);

/// 1 - xi^2 / (1 + xi + xi^2), for |xi| < 1.
[[nodiscard]] double rho_single_cycle_closed(double xi);

/// f0(a) = 1 if all three arguments agree, theta otherwise.
[[nodiscard]] LocalFunctionTable f0_table(double theta);

struct F0Model {
  double theta;
  IncidenceMatrix incidence;
  Nfg nfg;
  [[nodiscard]] std::size_t m() const noexcept { return incidence.rows(); }
  [[nodiscard]] std::size_t n() const noexcept { return incidence.cols(); }
};

/// Throws ValidationError on theta outside (0,1], a row weight other than 3,
/// a column weight other than 2 or 3m != 2n. Node r is "f<r+1>", edge c is
/// "e<c+1>"; ports follow ascending column order, and each edge runs from its
/// lower row to its higher row.
[[nodiscard]] F0Model f0_model(double theta, const IncidenceMatrix& h);

/// theta if every node of nfg is an arity-3 f0 table with the same theta and
/// every edge is full; nullopt otherwise.
[[nodiscard]] std::optional<double> f0_parameter(const Nfg& nfg);

/// Checks f(x v y) f(x ^ y) >= f(x) f(y) over all pairs of argument tuples.
[[nodiscard]] bool is_log_supermodular(const LocalFunctionTable& f);

}  // namespace bethe
