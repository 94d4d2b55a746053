#include "bethe/dct.hpp"

#include <cmath>
#include <cstdio>

#include "bethe/covers.hpp"
#include "bethe/lct.hpp"
#include "bethe/parallel.hpp"
#include "bethe/summation.hpp"

namespace bethe {

std::string_view pair_state_name(PairState s) noexcept {
  switch (s) {
    case PairState::zero_zero: return "(0,0)";
    case PairState::zero_one: return "(0,1)";
    case PairState::one_zero: return "(1,0)";
    case PairState::one_one: return "(1,1)";
  }
  return "?";
}

std::string_view dct_stage_name(DctStage s) noexcept {
  switch (s) {
    case DctStage::general: return "general";
    case DctStage::post_lct: return "post_lct";
    case DctStage::pruned: return "pruned";
    case DctStage::alpha_beta: return "alpha_beta";
  }
  return "?";
}

DctStage parse_dct_stage(std::string_view name) {
  for (auto s : {DctStage::general, DctStage::post_lct, DctStage::pruned, DctStage::alpha_beta}) {
    if (dct_stage_name(s) == name) return s;
  }
  throw ValidationError("unknown DCT stage \"" + std::string(name) + "\"");
}

namespace {

constexpr std::size_t O = 0;   // (0,0)
constexpr std::size_t Z = 1;   // 0^ = (0,1)
constexpr std::size_t N = 2;   // 1^ = (1,0)
constexpr std::size_t I = 3;   // (1,1)

struct Entries {
  std::array<double, 64> v{};
  void put(std::size_t a, std::size_t b, std::size_t c, double x) { v[16 * a + 4 * b + c] = x; }
};

}  // namespace

DctTable dct_table_general(const LocalFunctionTable& f) {
  if (f.arity() != 3) throw ValidationError("the double-cover transform is defined for arity-3 tables only");
  auto t = [&](int a1, int a2, int a3) { return f.at(static_cast<std::size_t>(a1 << 2 | a2 << 1 | a3)); };
  const double t000 = t(0, 0, 0), t001 = t(0, 0, 1), t010 = t(0, 1, 0), t011 = t(0, 1, 1);
  const double t100 = t(1, 0, 0), t101 = t(1, 0, 1), t110 = t(1, 1, 0), t111 = t(1, 1, 1);
  const double r2 = std::sqrt(2.0);
  const double gamma = 1.0 / std::sqrt(2.0);

  // conditional 2x2 matrices T_{f|a_i = v}: rows/columns are the two free
  // arguments in order
  auto perm = [](double a, double b, double c, double d) { return a * d + b * c; };
  auto det = [](double a, double b, double c, double d) { return a * d - b * c; };
  const double perm_a3_0 = perm(t000, t010, t100, t110), det_a3_0 = det(t000, t010, t100, t110);
  const double perm_a3_1 = perm(t001, t011, t101, t111), det_a3_1 = det(t001, t011, t101, t111);
  const double perm_a1_0 = perm(t000, t001, t010, t011), det_a1_0 = det(t000, t001, t010, t011);
  const double perm_a1_1 = perm(t100, t101, t110, t111), det_a1_1 = det(t100, t101, t110, t111);
  const double perm_a2_0 = perm(t000, t001, t100, t101), det_a2_0 = det(t000, t001, t100, t101);
  const double perm_a2_1 = perm(t010, t011, t110, t111), det_a2_1 = det(t010, t011, t110, t111);

  const double c_zzz = gamma * (t000 * t111 + t100 * t011 + t010 * t101 + t001 * t110);
  const double c_nzn = gamma * (t000 * t111 - t100 * t011 + t010 * t101 - t001 * t110);
  const double c_znn = gamma * (t000 * t111 + t100 * t011 - t010 * t101 - t001 * t110);
  const double c_nnz = gamma * (t000 * t111 - t100 * t011 - t010 * t101 + t001 * t110);

  Entries e;
  // third argument (0,0)
  e.put(O, O, O, t000 * t000);
  e.put(O, Z, O, r2 * t000 * t010);
  e.put(O, I, O, t010 * t010);
  e.put(Z, O, O, r2 * t000 * t100);
  e.put(Z, Z, O, perm_a3_0);
  e.put(Z, I, O, r2 * t010 * t110);
  e.put(N, N, O, det_a3_0);
  e.put(I, O, O, t100 * t100);
  e.put(I, Z, O, r2 * t100 * t110);
  e.put(I, I, O, t110 * t110);
  // third argument 0^
  e.put(O, O, Z, r2 * t000 * t001);
  e.put(O, Z, Z, perm_a1_0);
  e.put(O, I, Z, r2 * t010 * t011);
  e.put(Z, O, Z, perm_a2_0);
  e.put(Z, Z, Z, c_zzz);
  e.put(Z, I, Z, perm_a2_1);
  e.put(N, N, Z, c_nnz);
  e.put(I, O, Z, r2 * t100 * t101);
  e.put(I, Z, Z, perm_a1_1);
  e.put(I, I, Z, r2 * t110 * t111);
  // third argument 1^
  e.put(O, N, N, det_a1_0);
  e.put(Z, N, N, c_znn);
  e.put(N, O, N, det_a2_0);
  e.put(N, Z, N, c_nzn);
  e.put(N, I, N, det_a2_1);
  e.put(I, N, N, det_a1_1);
  // third argument (1,1)
  e.put(O, O, I, t001 * t001);
  e.put(O, Z, I, r2 * t001 * t011);
  e.put(O, I, I, t011 * t011);
  e.put(Z, O, I, r2 * t001 * t101);
  e.put(Z, Z, I, perm_a3_1);
  e.put(Z, I, I, r2 * t011 * t111);
  e.put(N, N, I, det_a3_1);
  e.put(I, O, I, t101 * t101);
  e.put(I, Z, I, r2 * t101 * t111);
  e.put(I, I, I, t111 * t111);
  return DctTable(e.v, DctStage::general);
}

DctTable dct_table_post_lct(const LocalFunctionTable& f) {
  if (f.arity() != 3) throw ValidationError("the double-cover transform is defined for arity-3 tables only");
  if (f.at(0b100) != 0.0 || f.at(0b010) != 0.0 || f.at(0b001) != 0.0) {
    throw ValidationError("post-LCT table needs t100 = t010 = t001 = 0");
  }
  return DctTable(dct_table_general(f).values(), DctStage::post_lct);
}

DctTable prune_dct_table(const DctTable& t) {
  auto v = t.values();
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      for (std::size_t c = 0; c < 4; ++c) {
        if (a == N || b == N || c == N) v[16 * a + 4 * b + c] = 0.0;
      }
    }
  }
  return DctTable(v, DctStage::pruned);
}

DctTable dct_table_alpha_beta(double theta) {
  if (!(theta >= 0.2 && theta <= 1.0)) throw ValidationError("alpha/beta table needs 1/5 <= theta <= 1");
  const double alpha = (2.0 + 6.0 * theta) / std::sqrt(8.0);
  const double beta = (2.0 - 2.0 * theta) / std::sqrt(8.0);
  Entries e;
  e.put(O, O, O, alpha * alpha);
  e.put(Z, Z, O, alpha * beta);
  e.put(I, I, O, beta * beta);
  e.put(O, Z, Z, alpha * beta);
  e.put(Z, O, Z, alpha * beta);
  e.put(Z, I, Z, beta * beta);
  e.put(I, Z, Z, beta * beta);
  e.put(O, I, I, beta * beta);
  e.put(Z, Z, I, beta * beta);
  e.put(I, O, I, beta * beta);
  return DctTable(e.v, DctStage::alpha_beta);
}

std::string format_dct_table(const DctTable& t) {
  std::string out = "# stage " + std::string(dct_stage_name(t.provenance())) + "\n";
  char buf[64];
  for (std::size_t c = 0; c < 4; ++c) {
    out += "[a3 = " + std::string(pair_state_name(static_cast<PairState>(c))) + "]\n";
    std::snprintf(buf, sizeof buf, "%-6s", "a1\\a2");
    out += buf;
    for (std::size_t b = 0; b < 4; ++b) {
      std::snprintf(buf, sizeof buf, " %20s", std::string(pair_state_name(static_cast<PairState>(b))).c_str());
      out += buf;
    }
    out += '\n';
    for (std::size_t a = 0; a < 4; ++a) {
      std::snprintf(buf, sizeof buf, "%-6s", std::string(pair_state_name(static_cast<PairState>(a))).c_str());
      out += buf;
      for (std::size_t b = 0; b < 4; ++b) {
        const double x = t.at(a, b, c);
        std::snprintf(buf, sizeof buf, " %20.12g", x == 0.0 ? 0.0 : x);
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

DctNfg make_dct_nfg(const Nfg& nfg, DctStage stage) {
  require_valid(nfg);
  if (stage == DctStage::alpha_beta) throw ValidationError("make_dct_nfg: alpha_beta tables come from dct_table_alpha_beta");
  for (const Edge& e : nfg.edges()) {
    if (e.kind != EdgeKind::full) throw ValidationError("double-cover transform needs full edges only; " + e.id + " is half");
  }
  DctNfg out{nfg, {}};
  for (const Node& n : nfg.nodes()) {
    if (n.ports != 3) throw ValidationError("double-cover transform needs degree-3 nodes; " + n.id + " differs");
    DctTable t = stage == DctStage::post_lct ? dct_table_post_lct(n.table) : dct_table_general(n.table);
    out.tables.push_back(stage == DctStage::pruned ? prune_dct_table(t) : t);
  }
  return out;
}

double dct_partition_sum(const DctNfg& dnfg, PairDomain domain, std::size_t max_edges) {
  const Nfg& nfg = dnfg.base;
  require_valid(nfg);
  if (dnfg.tables.size() != nfg.node_count()) throw ValidationError("DCT model needs one table per node");
  const std::size_t n = nfg.edge_count();
  if (n > max_edges) {
    throw InfeasibleError("pair-state enumeration over " + std::to_string(n) + " edges exceeds the cap of " +
                          std::to_string(max_edges));
  }
  const std::vector<std::size_t> states =
      domain == PairDomain::full4 ? std::vector<std::size_t>{O, Z, N, I} : std::vector<std::size_t>{O, Z, I};
  const std::size_t radix = states.size();
  const auto ports = port_edges(nfg);
  for (std::size_t i = 0; i < nfg.node_count(); ++i) {
    if (ports[i].size() != 3) throw ValidationError("DCT model needs degree-3 nodes");
  }

  // edges [0, low) vary inside a block, edge 0 fastest
  const std::size_t low = std::min<std::size_t>(n, 6);
  std::size_t block_size = 1;
  for (std::size_t k = 0; k < low; ++k) block_size *= radix;
  std::size_t blocks = 1;
  for (std::size_t k = low; k < n; ++k) blocks *= radix;

  auto block_sum = [&](std::size_t block) {
    std::vector<std::size_t> digit(n, 0);
    std::size_t rest = block;
    for (std::size_t k = low; k < n; ++k) {
      digit[k] = rest % radix;
      rest /= radix;
    }
    CompensatedSum acc;
    for (std::size_t inner = 0; inner < block_size; ++inner) {
      std::size_t r = inner;
      for (std::size_t k = 0; k < low; ++k) {
        digit[k] = r % radix;
        r /= radix;
      }
      double prod = 1.0;
      for (std::size_t i = 0; i < ports.size() && prod != 0.0; ++i) {
        const auto& p = ports[i];
        prod *= dnfg.tables[i].at(states[digit[p[0]]], states[digit[p[1]]], states[digit[p[2]]]);
      }
      acc.add(prod);
    }
    return acc.value();
  };
  const auto sums = ordered_map<double>(blocks, block_sum);
  return compensated_sum(sums);
}

namespace {

double principal_root(double s) {
  if (s < 0.0) throw Error("pair-state partition sum is negative (" + std::to_string(s) + "); tables are inconsistent");
  return std::sqrt(s);
}

}  // namespace

double z_bethe2_via_dct(double theta, const IncidenceMatrix& h) {
  const LctModel lct = build_lct_model(theta, h);
  const DctTable table = prune_dct_table(dct_table_general(lct.node_table));
  DctNfg dnfg{lct.transformed, std::vector<DctTable>(lct.transformed.node_count(), table)};
  return principal_root(dct_partition_sum(dnfg, PairDomain::pruned3));
}

double z_bethe2_via_dct(const Nfg& nfg) {
  return principal_root(dct_partition_sum(make_dct_nfg(nfg, DctStage::pruned), PairDomain::pruned3));
}

DctOracleReport dct_oracle_report(const Nfg& nfg, DctStage stage) {
  const DctNfg dnfg = make_dct_nfg(nfg, stage);
  DctOracleReport r{};
  r.pruned3 = dct_partition_sum(dnfg, PairDomain::pruned3);
  r.full4 = dct_partition_sum(dnfg, PairDomain::full4);
  CompensatedSum covers;
  std::size_t count = 0;
  CoverEnumerator it(nfg, 2);
  do {
    covers.add(partition_sum(build_cover(nfg, it.current())));
    ++count;
  } while (it.next());
  r.cover_mean = covers.value() / static_cast<double>(count);
  const double z = partition_sum(nfg);
  r.z_squared = z * z;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  r.pruned3_vs_covers = rel(r.pruned3, r.cover_mean);
  r.full4_vs_covers = rel(r.full4, r.cover_mean);
  r.full4_vs_z_squared = rel(r.full4, r.z_squared);
  return r;
}

}  // namespace bethe
