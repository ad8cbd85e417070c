#include "flowsparse/splice_compose.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace flowsparse;
using namespace fs_test;

namespace {

TerminalNetwork star3() {
  return TerminalNetwork({"a", "b", "c", "v"}, {"a", "b", "c"}, {{"a", "v", 2}, {"b", "v", 2}, {"c", "v", 2}});
}

TerminalNetwork path_stu() {
  return TerminalNetwork({"s", "t", "u"}, {"s", "t", "u"}, {{"s", "t", 3}, {"t", "u", 3}});
}

FlowDecomposition stu_decomposition() {
  FlowDecomposition dec;
  dec.terminals = {"s", "t", "u"};
  dec.paths.push_back({0, {"s", "t", "u"}, 2});
  dec.next_id = 1;
  return dec;
}

// Decomposition of an optimal concurrent flow with at least one internal terminal.
FlowDecomposition decomposition_with_internal_terminals(std::mt19937_64& rng, TerminalNetwork& net_out) {
  for (;;) {
    auto net = random_net(rng, 8, 5, 4);
    auto res = lambda(net, random_demand(rng, net, 0.6));
    auto dec = decompose_flow(net, res.primal);
    if (dec.internal_terminal_count() > 0) {
      net_out = net;
      return dec;
    }
  }
}

}  // namespace

TEST(Decompose, SinglePath) {
  TerminalNetwork net({"s", "x", "t"}, {"s", "t"}, {{"s", "x", 2}, {"x", "t", 5}});
  DemandVector d;
  d.set("s", "t", 1);
  auto dec = decompose_flow(net, lambda(net, d).primal);
  ASSERT_EQ(dec.paths.size(), 1U);
  EXPECT_EQ(dec.paths[0].vertices, (std::vector<VertexId>{"s", "x", "t"}));
  EXPECT_EQ(dec.paths[0].amount, 2);
}

TEST(Decompose, TwoDisjointPaths) {
  TerminalNetwork net({"s", "a", "b", "t"}, {"s", "t"}, {{"s", "a", 1}, {"a", "t", 1}, {"s", "b", 1}, {"b", "t", 1}});
  DemandVector d;
  d.set("s", "t", 1);
  auto dec = decompose_flow(net, lambda(net, d).primal);
  ASSERT_EQ(dec.paths.size(), 2U);
  EXPECT_EQ(dec.paths[0].amount, 1);
  EXPECT_EQ(dec.paths[1].amount, 1);
}

TEST(Decompose, StarAllOnes) {
  DemandVector d;
  d.set("a", "b", 1);
  d.set("b", "c", 1);
  d.set("a", "c", 1);
  auto res = lambda(star3(), d);
  auto dec = decompose_flow(star3(), res.primal);
  ASSERT_EQ(dec.paths.size(), 3U);
  for (const auto& p : dec.paths) {
    EXPECT_EQ(p.vertices.size(), 3U);
    EXPECT_NEAR(to_double(p.amount), 1.0, 1e-9);
  }
}

TEST(Decompose, InducedDemandAndPathCount) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = random_net(rng, 9, 4, 6);
    auto d = random_demand(rng, net);
    auto res = lambda(net, d);
    auto dec = decompose_flow(net, res.primal);
    check_decomposition(net, dec, 1e-7);
    auto induced = dec.demand();
    for (const auto& [key, v] : d.entries()) EXPECT_NEAR(induced.get(key.first, key.second), res.value * v, 1e-6 * std::max(1.0, res.value * v));
    std::map<TerminalPair, std::size_t> count;
    for (const auto& p : dec.paths) ++count[make_pair_key(p.vertices.front(), p.vertices.back())];
    for (const auto& [key, c] : count) EXPECT_LE(c, net.num_edges());
  }
}

TEST(Decompose, RejectsInfeasible) {
  TerminalNetwork net({"s", "t"}, {"s", "t"}, {{"s", "t", 1}});
  FlowSolution sol;
  sol.lambda = 1;
  sol.commodities.push_back({0, 1, 5});
  sol.edge_flow = {{5.0}};
  EXPECT_THROW(decompose_flow(net, sol), InputError);
}

TEST(Splice, TerminalFreeIsIdentity) {
  FlowDecomposition dec;
  dec.terminals = {"s", "t"};
  dec.paths.push_back({0, {"s", "x", "t"}, 3});
  dec.next_id = 1;
  auto r = splice(dec);
  EXPECT_TRUE(r.log.empty());
  ASSERT_EQ(r.decomposition.paths.size(), 1U);
  EXPECT_EQ(r.decomposition.paths[0].vertices, dec.paths[0].vertices);
}

TEST(Splice, SingleSplit) {
  auto r = splice(stu_decomposition());
  ASSERT_EQ(r.decomposition.paths.size(), 2U);
  EXPECT_EQ(r.decomposition.paths[0].vertices, (std::vector<VertexId>{"s", "t"}));
  EXPECT_EQ(r.decomposition.paths[1].vertices, (std::vector<VertexId>{"t", "u"}));
  EXPECT_EQ(r.decomposition.paths[0].amount, 2);
  EXPECT_EQ(r.decomposition.paths[1].amount, 2);
  ASSERT_EQ(r.log.size(), 1U);
  EXPECT_EQ(r.log[0].via, "t");
}

TEST(Splice, LoadsPreservedAndDemandShifted) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    TerminalNetwork net = path_stu();
    auto dec = decomposition_with_internal_terminals(rng, net);
    auto r = splice(dec);
    EXPECT_EQ(edge_loads(dec), edge_loads(r.decomposition));
    EXPECT_EQ(r.decomposition.internal_terminal_count(), 0U);
    EXPECT_EQ(r.log.size(), dec.internal_terminal_count());
    // Demand bookkeeping per split.
    auto dem = dec.demand_exact();
    for (const auto& s : r.log) {
      dem[make_pair_key(s.from, s.to)] -= s.amount;
      dem[make_pair_key(s.from, s.via)] += s.amount;
      dem[make_pair_key(s.via, s.to)] += s.amount;
    }
    std::erase_if(dem, [](const auto& kv) { return kv.second == 0; });
    EXPECT_EQ(dem, r.decomposition.demand_exact());
  }
}

TEST(Unsplice, NoSplitsReturnsSameRouting) {
  TerminalNetwork net({"s", "x", "t"}, {"s", "t"}, {{"s", "x", 2}, {"x", "t", 5}});
  DemandVector d;
  d.set("s", "t", 1);
  auto res = lambda(net, d);
  auto out = unsplice_route(net, d, res.primal, {});
  EXPECT_EQ(flow_violation(net, out), "");
  EXPECT_NEAR(out.lambda, 2.0, 1e-9);
  EXPECT_EQ(out.edge_flow, res.primal.edge_flow);
}

TEST(Unsplice, PathExample) {
  auto net = path_stu();
  auto r = splice(stu_decomposition());
  auto route = to_flow_solution(net, r.decomposition);
  DemandVector d;
  d.set("s", "u", 2);
  auto out = unsplice_route(net, d, route, r.log);
  EXPECT_EQ(flow_violation(net, out), "");
  ASSERT_EQ(out.paths.size(), 1U);
  EXPECT_EQ(out.paths[0].vertices.size(), 3U);
  EXPECT_DOUBLE_EQ(out.paths[0].amount, 2.0);
}

TEST(Unsplice, RandomRoundTrip) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 15; ++trial) {
    TerminalNetwork net = path_stu();
    auto dec = decomposition_with_internal_terminals(rng, net);
    auto r = splice(dec);
    auto d = dec.demand();
    // Route the spliced demand by its own paths, and by the oracle.
    auto own = unsplice_route(net, d, to_flow_solution(net, r.decomposition), r.log);
    EXPECT_EQ(flow_violation(net, own), "");
    EXPECT_NEAR(own.lambda, 1.0, 1e-12);
    auto oracle = lambda(net, r.decomposition.demand());
    EXPECT_GE(oracle.value, 1 - 1e-7);
    auto routed = unsplice_route(net, d, oracle.primal, r.log);
    EXPECT_EQ(flow_violation(net, routed), "");
    EXPECT_NEAR(routed.lambda, oracle.value, 1e-12);
  }
}

TEST(Unsplice, InconsistentLogRejected) {
  auto net = path_stu();
  auto r = splice(stu_decomposition());
  auto route = to_flow_solution(net, r.decomposition);
  DemandVector d;
  d.set("s", "u", 1);
  EXPECT_THROW(unsplice_route(net, d, route, r.log), InputError);
}

TEST(Compose, QualityIsMax) {
  TerminalNetwork a({"s", "x"}, {"s", "x"}, {{"s", "x", 3}});
  TerminalNetwork b({"y", "t"}, {"y", "t"}, {{"y", "t", 5}});
  EXPECT_DOUBLE_EQ(compose(a, b, {{"x", "y"}}, 1, 1).claimed_quality, 1.0);
  EXPECT_DOUBLE_EQ(compose(a, b, {{"x", "y"}}, 1, 2).claimed_quality, 2.0);
  EXPECT_THROW(compose(a, b, {{"x", "y"}}, 0.5, 1), InputError);
}

TEST(Compose, SeriesOfSingleEdges) {
  TerminalNetwork g1({"s", "x", "m"}, {"s", "m"}, {{"s", "x", 3}, {"x", "m", 4}});
  TerminalNetwork g2({"m", "y", "t"}, {"m", "t"}, {{"m", "y", 5}, {"y", "t", 9}});
  TerminalNetwork h1({"s", "m"}, {"s", "m"}, {{"s", "m", 3}});
  TerminalNetwork h2({"m", "t"}, {"m", "t"}, {{"m", "t", 5}});
  auto orig = phi_merge(g1, g2, {{"m", "m"}});
  auto comp = compose(h1, h2, {{"m", "m"}}, 1, 1);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    auto d = random_demand(rng, orig);
    EXPECT_NEAR(lambda_value(orig, d), lambda_value(comp.net, d), 1e-6 * lambda_value(orig, d));
  }
}
