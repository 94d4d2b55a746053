#include "bethe/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bethe {

IncidenceMatrix::IncidenceMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw ValidationError("incidence matrix data has the wrong size");
  for (auto v : data_) {
    if (v > 1) throw ValidationError("incidence matrix entries must be 0 or 1");
  }
}

std::vector<std::size_t> IncidenceMatrix::row_support(std::size_t r) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (at(r, c)) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> IncidenceMatrix::col_support(std::size_t c) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (at(r, c)) out.push_back(r);
  }
  return out;
}

IncidenceMatrix parse_incidence(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::uint8_t> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::size_t count = 0;
    while (ls >> tok) {
      if (tok != "0" && tok != "1") throw ValidationError("incidence matrix: unexpected token \"" + tok + "\"");
      data.push_back(tok == "1" ? 1 : 0);
      ++count;
    }
    if (count == 0) continue;
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ValidationError("incidence matrix: row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                            " entries, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw ValidationError("incidence matrix: no rows");
  return IncidenceMatrix(rows, cols, std::move(data));
}

std::string format_incidence(const IncidenceMatrix& h) {
  std::string out;
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) {
      if (c) out += ' ';
      out += h.at(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

IncidenceMatrix load_incidence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open incidence matrix file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_incidence(buf.str());
}

IncidenceMatrix appendix_d_incidence() {
  return parse_incidence(
      "0 0 0 0 0 0 0 0 1 1 0 1\n"
      "0 0 1 0 0 0 0 1 0 0 1 0\n"
      "0 0 1 0 0 1 0 0 1 0 0 0\n"
      "0 0 0 0 1 1 1 0 0 0 0 0\n"
      "1 1 0 0 1 0 0 0 0 0 0 0\n"
      "1 0 0 0 0 0 0 0 0 0 1 1\n"
      "0 0 0 1 0 0 0 1 0 1 0 0\n"
      "0 1 0 1 0 0 1 0 0 0 0 0\n");
}

IncidenceMatrix theta_graph_incidence() { return parse_incidence("1 1 1\n1 1 1\n"); }

IncidenceMatrix k4_incidence() {
  return parse_incidence(
      "1 1 1 0 0 0\n"
      "1 0 0 1 1 0\n"
      "0 1 0 1 0 1\n"
      "0 0 1 0 1 1\n");
}

SingleCycleModel single_cycle_model(const Table2x2& t) {
  for (double v : t) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("single-cycle table must be strictly positive");
  }
  const auto [a, b, c, d] = t;
  const double trace = a + d;
  const double det = a * d - b * c;
  // (a-d)^2 + 4bc > 0 for positive tables, so both roots are real
  const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
  const double lambda1 = 0.5 * (trace + disc);
  const double lambda2 = det / lambda1;
  return SingleCycleModel{t, lambda1, lambda2, lambda2 / lambda1};
}

Nfg single_cycle_nfg(const Table2x2& t) {
  (void)single_cycle_model(t);
  NfgBuilder b;
  const auto f1 = b.add_node("f1", LocalFunctionTable(2, {t[0], t[1], t[2], t[3]}));
  b.add_full_edge("e1", {f1, 0}, {f1, 1});
  return b.build();
}

ClosedForms single_cycle_closed_forms(const Table2x2& t) {
  const auto m = single_cycle_model(t);
  const double l1 = m.lambda1;
  const double l2 = m.lambda2;
  return ClosedForms{l1 + l2, std::sqrt(l1 * l1 + l1 * l2 + l2 * l2), l1};
}

double rho(double z, double z_bethe2, double z_bethe) {
  if (z_bethe2 == 0.0) throw ValidationError("rho: Z_Bethe,2 is zero");
  return z * z_bethe / (z_bethe2 * z_bethe2);
}

double rho_single_cycle_closed(double xi) { return 1.0 - xi * xi / (1.0 + xi + xi * xi); }

LocalFunctionTable f0_table(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in (0, 1]");
  std::vector<double> v(8, theta);
  v[0b000] = 1.0;
  v[0b111] = 1.0;
  return LocalFunctionTable(3, std::move(v));
}

F0Model f0_model(double theta, const IncidenceMatrix& h) {
  const auto table = f0_table(theta);
  if (3 * h.rows() != 2 * h.cols()) {
    throw ValidationError("f0 model needs 3m = 2n, got m = " + std::to_string(h.rows()) +
                          ", n = " + std::to_string(h.cols()));
  }
  for (std::size_t r = 0; r < h.rows(); ++r) {
    if (h.row_support(r).size() != 3) throw ValidationError("row " + std::to_string(r + 1) + " does not have weight 3");
  }
  std::vector<std::vector<std::size_t>> cols(h.cols());
  for (std::size_t c = 0; c < h.cols(); ++c) {
    cols[c] = h.col_support(c);
    if (cols[c].size() != 2) throw ValidationError("column " + std::to_string(c + 1) + " does not have weight 2");
  }
  std::vector<Node> nodes;
  for (std::size_t r = 0; r < h.rows(); ++r) nodes.push_back(Node{"f" + std::to_string(r + 1), 3, table});
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < h.cols(); ++c) {
    std::vector<Endpoint> ends;
    for (std::size_t r : cols[c]) {
      const auto support = h.row_support(r);
      const auto port = static_cast<std::size_t>(std::find(support.begin(), support.end(), c) - support.begin());
      ends.push_back(Endpoint{r, port});
    }
    edges.push_back(Edge{"e" + std::to_string(c + 1), EdgeKind::full, std::move(ends)});
  }
  return F0Model{theta, h, Nfg(std::move(nodes), std::move(edges))};
}

std::optional<double> f0_parameter(const Nfg& nfg) {
  if (nfg.node_count() == 0) return std::nullopt;
  for (const Edge& e : nfg.edges()) {
    if (e.kind != EdgeKind::full) return std::nullopt;
  }
  const double theta = nfg.node(0).table.arity() == 3 ? nfg.node(0).table.at(1) : -1.0;
  if (!(theta > 0.0 && theta <= 1.0)) return std::nullopt;
  const auto expected = f0_table(theta);
  for (const Node& n : nfg.nodes()) {
    if (n.ports != 3 || n.table.arity() != 3) return std::nullopt;
    if (!std::equal(n.table.values().begin(), n.table.values().end(), expected.values().begin())) {
      return std::nullopt;
    }
  }
  return theta;
}

bool is_log_supermodular(const LocalFunctionTable& f) {
  const std::size_t size = f.values().size();
  for (std::size_t x = 0; x < size; ++x) {
    for (std::size_t y = 0; y < size; ++y) {
      if (f.at(x | y) * f.at(x & y) < f.at(x) * f.at(y)) return false;
    }
  }
  return true;
}

}  // namespace bethe
