// Acceptance suite: one [PASS]/[FAIL] line per criterion. Tolerances are
// fixed here and never adjusted to make a criterion pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bethe/cli.hpp"
#include "bethe/covers.hpp"
#include "bethe/dct.hpp"
#include "bethe/lct.hpp"
#include "bethe/models.hpp"
#include "bethe/spa.hpp"
#include "oracles.hpp"

using namespace bethe;

namespace {

// criterion 1, 4, 5, 6
constexpr double kClosedFormTol = 1e-9;
constexpr double kBethe8Tol = 1e-8;
// criterion 2
constexpr double kRhoTol = 1e-10;
constexpr double kRhoLimitTol = 1e-3;
// criterion 3
constexpr double kCubicTol = 1e-10;
constexpr double kProductTol = 1e-10;
constexpr double kTransitionStep = 1e-6;
// criterion 6
constexpr double kSigmas = 4.0;
constexpr std::size_t kMcSamples = 8;
constexpr std::uint64_t kMcSeed = 1;
// criterion 7: calibrated once against the exhaustive pipeline on the
// 8x12 model (max 0.0698 and 0.00082 over theta >= 0.4), then frozen
constexpr double kEpsB = 0.08;
constexpr double kEpsM = 0.001;
constexpr double kRhoMinLo = -0.40, kRhoMinHi = -0.15;
constexpr double kThetaMinLo = 0.10, kThetaMinHi = 0.35;
constexpr double kRhoSignTol = 1e-12;
// criterion 8
constexpr double kRuozziTol = 1e-9;
// criterion 9
constexpr double kTelescopeTol = 0.30;
// runtimes in seconds
constexpr double kBudget1 = 1.0, kBudget4 = 10.0, kBudget6 = 300.0, kBudget7 = 120.0;

struct Outcome {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<double> grid(double a, double step, double b) {
  std::vector<double> out;
  for (int i = 0; a + i * step <= b + 1e-9; ++i) out.push_back(std::round((a + i * step) * 1e9) / 1e9);
  return out;
}

const IncidenceMatrix& theta_h() {
  static const IncidenceMatrix h = theta_graph_incidence();
  return h;
}
const IncidenceMatrix& k4_h() {
  static const IncidenceMatrix h = k4_incidence();
  return h;
}
const IncidenceMatrix& d_h() {
  static const IncidenceMatrix h = [] {
    const char* dir = std::getenv("BETHE_FIXTURES");
    return dir ? load_incidence(std::string(dir) + "/appendix_d.txt") : appendix_d_incidence();
  }();
  return h;
}

double exhaustive_two_cover_mean(const Nfg& g) {
  long double total = 0.0L;
  const auto covers = enumerate_two_covers(g);
  for (const auto& s : covers) total += oracle::brute_z(build_cover(g, s));
  return static_cast<double>(total / covers.size());
}

Outcome c1() {
  Stopwatch sw;
  double worst = 0.0;
  for (double theta : grid(0.05, 0.05, 1.0)) {
    const Table2x2 t = symmetric_table(theta);
    const Nfg g = single_cycle_nfg(t);
    const double l1 = 1 + theta, l2 = 1 - theta;
    worst = std::max(worst, oracle::rel(partition_sum(g), l1 + l2));
    worst = std::max(worst, oracle::rel(degree_m_bethe_exact(g, 2).point, std::sqrt(l1 * l1 + l1 * l2 + l2 * l2)));
    worst = std::max(worst, oracle::rel(bethe_partition_sum(g).z_bethe, l1));
  }
  const double s = sw.seconds();
  return {worst <= kClosedFormTol && s < kBudget1, "max rel err " + sci(worst) + ", " + sci(s) + " s"};
}

double pipeline_rho(double theta) {
  const Nfg g = single_cycle_nfg(symmetric_table(theta));
  return rho(partition_sum(g), degree_m_bethe_exact(g, 2).point, bethe_partition_sum(g).z_bethe);
}

Outcome c2() {
  double worst = 0.0;
  for (double theta : grid(0.05, 0.05, 1.0)) {
    const double xi = (1 - theta) / (1 + theta);
    worst = std::max(worst, std::abs(pipeline_rho(theta) - rho_single_cycle_closed(xi)));
  }
  const double near0 = pipeline_rho(0.999), near1 = pipeline_rho(0.001);
  const bool limits = std::abs(near0 - 1.0) <= kRhoLimitTol && std::abs(near1 - 2.0 / 3.0) <= kRhoLimitTol;
  return {worst <= kRhoTol && limits,
          "max |rho - closed| " + sci(worst) + ", rho(0.999) = " + sci(near0) + ", rho(0.001) = " + sci(near1)};
}

Outcome c3() {
  double cubic = 0.0, product = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double theta = 0.01 * i;
    const auto fps = symmetric_fixed_points(theta);
    for (const auto& fp : fps) cubic = std::max(cubic, std::abs(fixed_point_cubic(theta, fp.lambda)));
    if (i <= 19) product = std::max(product, std::abs(fps[1].lambda * fps[2].lambda - 1.0));
  }
  const double below = lambda_update(0.2 - kTransitionStep, 1.0).derivative;
  const double at = lambda_update(0.2, 1.0).derivative;
  const double above = lambda_update(0.2 + kTransitionStep, 1.0).derivative;
  const bool crossing = below > 1.0 && above < 1.0 && at == 1.0;
  return {cubic < kCubicTol && product <= kProductTol && crossing,
          "max cubic residual " + sci(cubic) + ", max |L+ L- - 1| " + sci(product) + ", derivative " +
              sci(below - 1) + " / " + sci(at - 1) + " / " + sci(above - 1) + " around 1"};
}

Outcome c4() {
  Stopwatch sw;
  double worst = 0.0;
  for (double theta : grid(0.2, 0.05, 1.0)) {
    const double closed = std::pow((2 + 6 * theta) / std::sqrt(8.0), 8);
    worst = std::max(worst, oracle::rel(bethe_partition_sum(f0_model(theta, d_h()).nfg).z_bethe, closed));
  }
  const double s = sw.seconds();
  return {worst <= kBethe8Tol && s < kBudget4, "max rel err " + sci(worst) + ", " + sci(s) + " s"};
}

std::size_t brute_codeword_count(const IncidenceMatrix& h) {
  std::size_t count = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << h.cols()); ++x) {
    bool ok = true;
    for (std::size_t r = 0; r < h.rows() && ok; ++r) {
      int s = 0;
      for (std::size_t c = 0; c < h.cols(); ++c) s += h.at(r, c) && (x >> c & 1);
      ok = s % 2 == 0;
    }
    count += ok;
  }
  return count;
}

Outcome c5() {
  double worst = 0.0;
  bool counts = true;
  std::string count_text;
  const std::pair<const IncidenceMatrix*, std::size_t> models[] = {{&theta_h(), 4}, {&k4_h(), 8}, {&d_h(), 32}};
  for (const auto& [h, expected] : models) {
    for (double theta : {0.2, 0.5, 1.0}) {
      const LctModel l = build_lct_model(theta, *h);
      const double z = oracle::brute_z(l.base.nfg);
      const double zb = bethe_partition_sum(l.base.nfg).z_bethe;
      const double g0 = evaluate_global(l.transformed, Configuration::from_mask(h->cols(), 0));
      worst = std::max(worst, oracle::rel(g0, zb));
      worst = std::max(worst, oracle::rel(oracle::brute_z(l.transformed), z));
      worst = std::max(worst, oracle::rel(loop_series_decomposition(theta, *h).z, partition_sum(l.base.nfg)));
    }
    const std::size_t found = enumerate_cycle_codewords(*h).size();
    counts = counts && found == expected && found == brute_codeword_count(*h);
    count_text += (count_text.empty() ? "" : "/") + std::to_string(found);
  }
  return {worst <= kClosedFormTol && counts, "max rel err " + sci(worst) + ", codewords " + count_text};
}

Outcome c6() {
  Stopwatch sw;
  double worst = 0.0;
  for (const IncidenceMatrix* h : {&theta_h(), &k4_h()}) {
    for (double theta : {0.25, 0.5, 0.75, 1.0}) {
      const Nfg g = f0_model(theta, *h).nfg;
      const double mean = exhaustive_two_cover_mean(g);
      const LctModel l = build_lct_model(theta, *h);
      const DctNfg lct_dnfg{l.transformed,
                            std::vector<DctTable>(h->rows(), prune_dct_table(dct_table_general(l.node_table)))};
      worst = std::max(worst, oracle::rel(dct_partition_sum(lct_dnfg, PairDomain::pruned3), mean));
      worst = std::max(worst, oracle::rel(dct_partition_sum(make_dct_nfg(g), PairDomain::pruned3), mean));
    }
  }
  const Nfg d = f0_model(0.5, d_h()).nfg;
  const double via_dct = z_bethe2_via_dct(0.5, d_h());
  const DegreeMEstimate mc = degree_m_bethe_mc(d, 2, kMcSamples, kMcSeed);
  const double sigmas = std::abs(via_dct - mc.point) / mc.standard_error;
  const double s = sw.seconds();
  return {worst <= kClosedFormTol && sigmas <= kSigmas && s < kBudget6,
          "max rel err " + sci(worst) + "; 8x12 model: dct " + sci(via_dct) + " vs mc " + sci(mc.point) + " +- " +
              sci(mc.standard_error) + " (" + sci(sigmas) + " se), " + sci(s) + " s"};
}

Outcome c7() {
  Stopwatch sw;
  cli::ModelSpec spec;
  spec.kind = cli::ModelKind::f0;
  spec.matrix = d_h();
  const auto rows = cli::sweep(spec, cli::parse_grid("0.05:0.05:1"));
  const double s = sw.seconds();
  bool ok = s < kBudget7;
  double max_rho = -1e300, min_rho = 1e300, arg_min = 0.0, dev_b = 0.0, dev_m = 0.0;
  for (const auto& r : rows) {
    ok = ok && r.error.empty();
    max_rho = std::max(max_rho, r.log2_rho);
    if (r.log2_rho < min_rho) min_rho = r.log2_rho, arg_min = r.theta;
    if (r.theta >= 0.4 - 1e-9) {
      dev_b = std::max(dev_b, std::abs(r.log2_z - r.log2_zbethe));
      dev_m = std::max(dev_m, std::abs(r.log2_zbethe2 - 0.5 * (r.log2_z + r.log2_zbethe)));
    }
  }
  ok = ok && max_rho <= kRhoSignTol && arg_min >= kThetaMinLo && arg_min <= kThetaMinHi && min_rho >= kRhoMinLo &&
       min_rho <= kRhoMinHi && dev_b <= kEpsB && dev_m <= kEpsM;
  return {ok, "max log2 rho " + sci(max_rho) + ", min " + sci(min_rho) + " at theta " + sci(arg_min) +
                  ", |dZ_B| " + sci(dev_b) + " (eps " + sci(kEpsB) + "), midpoint " + sci(dev_m) + " (eps " +
                  sci(kEpsM) + "), " + sci(s) + " s"};
}

Outcome c8() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (const IncidenceMatrix* h : {&theta_h(), &k4_h()}) {
    for (double theta : {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0}) {
      const Nfg g = f0_model(theta, *h).nfg;
      const double z2 = std::pow(partition_sum(g), 2);
      for (const auto& spec : enumerate_two_covers(g)) {
        worst = std::max(worst, partition_sum(build_cover(g, spec)) / z2);
        ++checked;
      }
    }
  }
  const auto sampled = cli::ruozzi_check(f0_model(0.5, d_h()).nfg, kMcSamples, kMcSeed, false);
  worst = std::max(worst, sampled.max_ratio);
  checked += sampled.covers;
  return {worst <= 1.0 + kRuozziTol && sampled.covers >= 8,
          std::to_string(checked) + " covers, max Z(cover)/Z^2 = " + sci(worst)};
}

Outcome c9() {
  const Nfg g = single_cycle_nfg(symmetric_table(0.5));
  std::vector<double> zb;
  for (std::size_t m : {1, 2, 4, 8}) zb.push_back(degree_m_bethe_exact(g, m).point);
  const double z = zb[0];
  std::vector<double> log_eta;
  for (std::size_t k = 0; k + 1 < zb.size(); ++k) log_eta.push_back(std::log(zb[k] / zb[k + 1]));
  bool ok = true;
  std::ostringstream detail;
  detail << "eta ratios";
  for (std::size_t k = 0; k + 1 < log_eta.size(); ++k) {
    const double r = log_eta[k + 1] / (0.5 * log_eta[k]);
    ok = ok && std::abs(r - 1.0) <= kTelescopeTol;
    detail << " " << sci(r);
  }
  detail << "; Z/ZB_M ratios";
  const std::size_t ms[] = {2, 4, 8};
  for (std::size_t i = 0; i < 3; ++i) {
    const double m = static_cast<double>(ms[i]);
    const double r = std::log(z / zb[i + 1]) / (2.0 * (1.0 - 1.0 / m) * log_eta[0]);
    ok = ok && std::abs(r - 1.0) <= kTelescopeTol;
    detail << " " << sci(r);
  }
  detail << " (tolerance +-" << kTelescopeTol << ")";
  return {ok, detail.str()};
}

Outcome c10() {
  const std::string d = std::getenv("BETHE_FIXTURES") ? std::string(std::getenv("BETHE_FIXTURES")) + "/appendix_d.txt"
                                                      : std::string("builtin:appendix_d");
  const std::vector<std::vector<std::string>> commands = {
      {"exact", "--matrix", d, "--theta", "0.3"},
      {"bethe", "--matrix", d, "--theta", "0.1"},
      {"bethe2", "--matrix", "builtin:k4", "--theta", "0.4", "--bethe2-method", "mc", "--samples", "64", "--seed", "3"},
      {"bethe2", "--model", "single-cycle", "--theta", "0.5", "--m", "8", "--samples", "500", "--seed", "3"},
      {"sweep", "--matrix", d},
      {"telescope", "--model", "single-cycle", "--theta", "0.5", "--k-max", "4", "--samples", "200", "--seed", "11"},
      {"ruozzi", "--matrix", "builtin:k4", "--theta", "0.3", "--samples", "32", "--seed", "5"},
      {"lct-report", "--matrix", d, "--theta", "0.5"},
      {"dct-dump", "--theta", "0.5", "--stage", "general", "--f", "f0"},
  };
  std::size_t identical = 0;
  for (const auto& c : commands) {
    std::string outs[3];
    int codes[3];
    const char* threads[3] = {nullptr, "1", "3"};
    for (int k = 0; k < 3; ++k) {
      if (threads[k]) {
        setenv("BETHE_COVERS_THREADS", threads[k], 1);
      } else {
        unsetenv("BETHE_COVERS_THREADS");
      }
      std::ostringstream out, err;
      codes[k] = cli::run(c, out, err);
      outs[k] = out.str() + "\x1f" + err.str();
    }
    unsetenv("BETHE_COVERS_THREADS");
    identical += codes[0] == 0 && codes[0] == codes[1] && codes[1] == codes[2] && outs[0] == outs[1] && outs[1] == outs[2];
  }
  return {identical == commands.size(),
          std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical over 3 runs"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<Outcome()>>> c = {
      {1, {"single-cycle closed forms", c1}},
      {2, {"rho closed form and limits", c2}},
      {3, {"symmetric fixed points and transition", c3}},
      {4, {"Z_Bethe closed form on the 8x12 model", c4}},
      {5, {"loop-calculus identities and codeword counts", c5}},
      {6, {"pair-state sum equals the 2-cover average", c6}},
      {7, {"theta sweep shape", c7}},
      {8, {"2-cover inequality", c8}},
      {9, {"telescoping property", c9}},
      {10, {"determinism", c10}},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s), default all")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (const auto& [n, _] : criteria()) selected.push_back(n);
  }
  int failures = 0;
  for (int n : selected) {
    const auto& [name, fn] = criteria().at(n);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "C" << n << " " << name << ": " << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
