#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "bethe/models.hpp"
#include "bethe/nfg.hpp"
#include "bethe/nfg_io.hpp"
#include "oracles.hpp"

using namespace bethe;

namespace {

bool has_violation(const std::vector<Violation>& v, const std::string& needle) {
  for (const auto& x : v) {
    if (x.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

Nfg theta_graph(double theta) { return f0_model(theta, theta_graph_incidence()).nfg; }

}  // namespace

TEST_CASE("tables") {
  CHECK_THROWS_AS(LocalFunctionTable(2, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(LocalFunctionTable(1, {1, -1}), ValidationError);
  CHECK_NOTHROW(LocalFunctionTable(1, {1, -1}, true));
  const LocalFunctionTable t(3, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(t({1, 0, 1}) == 5);
  CHECK(t({0, 1, 1}) == 3);
  CHECK(LocalFunctionTable::constant(2, 0.5).at(3) == 0.5);
}

TEST_CASE("validate_nfg") {
  SUBCASE("five-node example is valid") {
    const Nfg g = oracle::five_node_graph(7);
    CHECK(validate_nfg(g).empty());
    CHECK(g.node_count() == 5);
    CHECK(g.full_edge_count() == 6);
    CHECK(g.edge_count() - g.full_edge_count() == 2);
  }
  SUBCASE("arity mismatch") {
    Nfg g({Node{"f1", 3, LocalFunctionTable::constant(2, 1.0)}},
          {Edge{"e1", EdgeKind::full, {{0, 0}, {0, 1}}}, Edge{"e2", EdgeKind::half, {{0, 2}}}});
    const auto v = validate_nfg(g);
    REQUIRE_FALSE(v.empty());
    CHECK(has_violation(v, "arity mismatch"));
    CHECK(v[0].subject == "f1");
  }
  SUBCASE("full edge with one endpoint") {
    Nfg g({Node{"f1", 1, LocalFunctionTable::constant(1, 1.0)}}, {Edge{"e1", EdgeKind::full, {{0, 0}}}});
    const auto v = validate_nfg(g);
    CHECK(has_violation(v, "full edge needs two endpoints"));
  }
  SUBCASE("half edge with two endpoints") {
    Nfg g({Node{"f1", 2, LocalFunctionTable::constant(2, 1.0)}}, {Edge{"e1", EdgeKind::half, {{0, 0}, {0, 1}}}});
    CHECK(has_violation(validate_nfg(g), "half edge needs exactly one endpoint"));
  }
  SUBCASE("uncovered and doubly covered ports") {
    Nfg g({Node{"f1", 2, LocalFunctionTable::constant(2, 1.0)}},
          {Edge{"e1", EdgeKind::half, {{0, 0}}}, Edge{"e2", EdgeKind::half, {{0, 0}}}});
    const auto v = validate_nfg(g);
    CHECK(has_violation(v, "port 1 is not covered"));
    CHECK(has_violation(v, "covered by 2"));
    CHECK_THROWS_AS(require_valid(g), ValidationError);
  }
  SUBCASE("self-loop uses distinct ports") {
    CHECK(validate_nfg(single_cycle_nfg(symmetric_table(0.5))).empty());
  }
}

TEST_CASE("evaluate_global") {
  const Nfg sc = single_cycle_nfg(symmetric_table(0.5));
  CHECK(evaluate_global(sc, Configuration::from_mask(1, 0)) == 1.0);
  CHECK(evaluate_global(sc, Configuration::from_mask(1, 1)) == 1.0);
  const Nfg tg = theta_graph(0.5);
  CHECK(evaluate_global(tg, Configuration::from_map(tg, {{"e1", 1}, {"e2", 1}, {"e3", 1}})) == 1.0);
  CHECK(evaluate_global(tg, Configuration::from_map(tg, {{"e1", 1}, {"e2", 1}, {"e3", 0}})) == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)evaluate_global(tg, Configuration(3)), ValidationError);
  CHECK_THROWS_AS(Configuration::from_map(tg, {{"nope", 1}}), ValidationError);
}

TEST_CASE("partition_sum examples") {
  CHECK(partition_sum(single_cycle_nfg(symmetric_table(0.5))) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(partition_sum(theta_graph(0.5)) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(partition_sum(f0_model(1.0, appendix_d_incidence()).nfg) == 4096.0);
  for (double t : {0.1, 0.3, 0.7}) {
    CHECK(partition_sum(theta_graph(t)) == doctest::Approx(2 + 6 * t * t).epsilon(1e-14));
  }
}

TEST_CASE("partition_sum against the plain loop") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Nfg g = oracle::five_node_graph(seed);
    CHECK(oracle::rel(partition_sum(g), oracle::brute_z(g)) < 1e-13);
  }
  const Nfg d = f0_model(0.37, appendix_d_incidence()).nfg;
  CHECK(oracle::rel(partition_sum(d), oracle::brute_z(d)) < 1e-13);
}

TEST_CASE("partition_sum properties") {
  SUBCASE("disjoint union multiplies") {
    const Nfg a = oracle::five_node_graph(11), b = theta_graph(0.3);
    const Nfg u = disjoint_union(a, b);
    CHECK(validate_nfg(u).empty());
    CHECK(oracle::rel(partition_sum(u), partition_sum(a) * partition_sum(b)) < 1e-13);
  }
  SUBCASE("relabeling invariance") {
    const Nfg g = oracle::five_node_graph(5);
    std::vector<Node> nodes(g.nodes().rbegin(), g.nodes().rend());
    const std::size_t m = g.node_count();
    std::vector<Edge> edges(g.edges().rbegin(), g.edges().rend());
    for (Edge& e : edges) {
      for (Endpoint& end : e.ends) end.node = m - 1 - end.node;
    }
    const Nfg h(nodes, edges);
    REQUIRE(validate_nfg(h).empty());
    CHECK(oracle::rel(partition_sum(h), partition_sum(g)) < 1e-13);
  }
  SUBCASE("monotone in theta and 2^n at theta = 1") {
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double z = partition_sum(f0_model(0.05 * i, appendix_d_incidence()).nfg);
      CHECK(z >= prev);
      prev = z;
    }
    CHECK(partition_sum(f0_model(1.0, k4_incidence()).nfg) == 64.0);
  }
  SUBCASE("enumeration cap") {
    const Nfg g = oracle::five_node_graph(1);
    CHECK_THROWS_WITH_AS((void)partition_sum(g, EnumerationLimits{4}), doctest::Contains("too large for exhaustive enumeration"),
                         InfeasibleError);
  }
}

TEST_CASE("partition_sum does not depend on the worker count") {
  const Nfg g = f0_model(0.29, appendix_d_incidence()).nfg;
  setenv("BETHE_COVERS_THREADS", "1", 1);
  const double one = partition_sum(g);
  setenv("BETHE_COVERS_THREADS", "4", 1);
  const double four = partition_sum(g);
  unsetenv("BETHE_COVERS_THREADS");
  CHECK(one == four);
}

TEST_CASE("json round trip") {
  const Nfg g = oracle::five_node_graph(9);
  const Nfg h = nfg_from_json(nfg_to_json(g));
  REQUIRE(h.node_count() == g.node_count());
  REQUIRE(h.edge_count() == g.edge_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(h.node(i).table == g.node(i).table);
  CHECK(partition_sum(h) == partition_sum(g));

  const Nfg s = nfg_from_json(R"({"nodes":[{"id":"f1","arity":2,"table":[1,0.5,0.5,1]}],
    "edges":[{"id":"e1","kind":"full","ends":[["f1",0],["f1",1]]}]})");
  CHECK(partition_sum(s) == 2.0);
  CHECK_THROWS_AS(nfg_from_json("{"), ValidationError);
  CHECK_THROWS_AS(nfg_from_json(R"({"nodes":[{"id":"f1","arity":2,"table":[1,1,1]}],"edges":[]})"), ValidationError);
}
