#include "bethe/lct.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bethe/summation.hpp"

namespace bethe {

namespace {

using Gf2Row = std::vector<std::uint8_t>;

std::vector<Gf2Row> to_rows(const IncidenceMatrix& h) {
  std::vector<Gf2Row> rows(h.rows(), Gf2Row(h.cols(), 0));
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) rows[r][c] = h.at(r, c) ? 1 : 0;
  }
  return rows;
}

// Reduced row echelon form in place; returns the pivot column of each
// nonzero row.
std::vector<std::size_t> rref(std::vector<Gf2Row>& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k != r && rows[k][c]) {
        for (std::size_t j = 0; j < cols; ++j) rows[k][j] ^= rows[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

CycleCodeword make_word(std::vector<std::uint8_t> bits) {
  const auto w = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
  return CycleCodeword{std::move(bits), w};
}

std::vector<CycleCodeword> by_scan(const IncidenceMatrix& h) {
  const std::size_t n = h.cols();
  if (n > 30) throw InfeasibleError("codeword scan over 2^" + std::to_string(n) + " vectors is too large");
  std::vector<std::uint64_t> row_masks(h.rows(), 0);
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (h.at(r, c)) row_masks[r] |= std::uint64_t{1} << c;
    }
  }
  std::vector<CycleCodeword> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const bool ok = std::all_of(row_masks.begin(), row_masks.end(),
                                [x](std::uint64_t m) { return (std::popcount(m & x) & 1) == 0; });
    if (!ok) continue;
    std::vector<std::uint8_t> bits(n);
    for (std::size_t c = 0; c < n; ++c) bits[c] = (x >> c) & 1u;
    out.push_back(make_word(std::move(bits)));
  }
  return out;
}

std::vector<CycleCodeword> by_elimination(const IncidenceMatrix& h) {
  const std::size_t n = h.cols();
  auto rows = to_rows(h);
  const auto pivots = rref(rows, n);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Gf2Row> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Gf2Row x(n, 0);
    x[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = rows[r][f];
    basis.push_back(std::move(x));
  }
  if (basis.size() > 30) throw InfeasibleError("cycle code of dimension " + std::to_string(basis.size()) + " is too large");
  std::vector<CycleCodeword> out;
  out.reserve(std::size_t{1} << basis.size());
  for (std::uint64_t combo = 0; combo < (std::uint64_t{1} << basis.size()); ++combo) {
    Gf2Row x(n, 0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if ((combo >> k) & 1u) {
        for (std::size_t j = 0; j < n; ++j) x[j] ^= basis[k][j];
      }
    }
    out.push_back(make_word(std::move(x)));
  }
  return out;
}

}  // namespace

LocalFunctionTable lct_node_table(double theta) {
  const double alpha = (2.0 + 6.0 * theta) / std::sqrt(8.0);
  const double beta = (2.0 - 2.0 * theta) / std::sqrt(8.0);
  std::vector<double> v(8, 0.0);
  v[0b000] = alpha;
  v[0b011] = beta;
  v[0b101] = beta;
  v[0b110] = beta;
  return LocalFunctionTable(3, std::move(v), true);
}

LctModel build_lct_model(double theta, const IncidenceMatrix& h) {
  if (!(theta >= 0.2)) throw ValidationError("LCT closed form available only for theta >= 1/5");
  if (!(theta <= 1.0)) throw ValidationError("theta must lie in (0, 1]");
  F0Model base = f0_model(theta, h);
  auto table = lct_node_table(theta);
  Nfg transformed = base.nfg.with_tables(std::vector<LocalFunctionTable>(base.nfg.node_count(), table));
  return LctModel{std::move(base), theta, std::move(table), (2.0 + 6.0 * theta) / std::sqrt(8.0),
                  (2.0 - 2.0 * theta) / std::sqrt(8.0), std::move(transformed)};
}

std::size_t gf2_rank(const IncidenceMatrix& h) {
  auto rows = to_rows(h);
  return rref(rows, h.cols()).size();
}

std::vector<CycleCodeword> enumerate_cycle_codewords(const IncidenceMatrix& h, CodewordSearch search) {
  for (std::size_t c = 0; c < h.cols(); ++c) {
    if (h.col_support(c).size() != 2) {
      throw ValidationError("cycle codewords need column weight 2; column " + std::to_string(c + 1) + " differs");
    }
  }
  if (search == CodewordSearch::automatic) {
    search = h.cols() <= 20 ? CodewordSearch::scan : CodewordSearch::elimination;
  }
  auto out = search == CodewordSearch::scan ? by_scan(h) : by_elimination(h);
  std::sort(out.begin(), out.end(), [](const CycleCodeword& a, const CycleCodeword& b) { return a.bits < b.bits; });
  return out;
}

std::vector<std::size_t> weight_enumerator(const std::vector<CycleCodeword>& codewords, std::size_t n) {
  std::vector<std::size_t> a(n + 1, 0);
  for (const auto& c : codewords) ++a.at(c.weight);
  return a;
}

double glct_of_weight(double theta, std::size_t m, std::size_t w) {
  const double z_bethe = std::pow((2.0 + 6.0 * theta) / std::sqrt(8.0), static_cast<double>(m));
  const double ratio = (2.0 - 2.0 * theta) / (2.0 + 6.0 * theta);
  return z_bethe * std::pow(ratio, static_cast<double>(w));
}

LoopSeries loop_series_decomposition(double theta, const IncidenceMatrix& h) {
  const LctModel model = build_lct_model(theta, h);
  const auto words = enumerate_cycle_codewords(h);
  const double ratio = (2.0 - 2.0 * theta) / (2.0 + 6.0 * theta);
  const double z_bethe = std::pow(model.alpha, static_cast<double>(h.rows()));
  CompensatedSum correction;
  for (const auto& c : words) {
    if (c.weight > 0) correction.add(std::pow(ratio, static_cast<double>(c.weight)));
  }
  return LoopSeries{z_bethe, correction.value(), z_bethe * (1.0 + correction.value()),
                    weight_enumerator(words, h.cols())};
}

}  // namespace bethe
