#include "flowsparse/flow_lp.hpp"
#include "flowsparse/graph_core.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace flowsparse;
using namespace fs_test;

namespace {

TerminalNetwork edge_net(const Rational& cap) { return TerminalNetwork({"s", "t"}, {"s", "t"}, {{"s", "t", cap}}); }

DemandVector unit(const std::string& s, const std::string& t) {
  DemandVector d;
  d.set(s, t, 1.0);
  return d;
}

}  // namespace

TEST(GraphCore, ParallelEdgesAreSummed) {
  TerminalNetwork net({"s", "t"}, {"s", "t"}, {{"s", "t", 3}, {"t", "s", 4}});
  ASSERT_EQ(net.num_edges(), 1U);
  EXPECT_EQ(net.edges()[0].cap, 7);
}

TEST(GraphCore, ZeroCapacityEdgesDropped) {
  TerminalNetwork net({"s", "t", "x"}, {"s", "t"}, {{"s", "t", 2}, {"s", "x", 0}, {"x", "t", 1}});
  EXPECT_EQ(net.num_edges(), 2U);
}

TEST(GraphCore, NormalizeIsIdempotent) {
  std::mt19937_64 rng(3);
  auto net = random_net(rng, 8, 3, 6);
  auto once = normalize(net);
  EXPECT_EQ(normalize(once), once);
  EXPECT_EQ(once, net);
}

TEST(GraphCore, RejectsBadInput) {
  EXPECT_THROW(TerminalNetwork({"a"}, {"a"}, {{"a", "a", 1}}), InputError);
  EXPECT_THROW(TerminalNetwork({"a", "b"}, {"a", "a"}, {{"a", "b", 1}}), InputError);
  EXPECT_THROW(TerminalNetwork({"a", "b"}, {"a"}, {{"a", "b", -1}}), InputError);
  EXPECT_THROW(TerminalNetwork({"a", "b", "c"}, {"a"}, {{"a", "b", 1}}), InputError);
  EXPECT_NO_THROW(TerminalNetwork({"a", "b", "c"}, {"a"}, {{"a", "b", 1}}, {.allow_disconnected = true}));
  EXPECT_THROW(TerminalNetwork({"a", "a"}, {"a"}, {}), InputError);
}

TEST(GraphCore, SubdivideSingleEdge) {
  auto sub = subdivide_terminal_edges(edge_net(10));
  EXPECT_EQ(sub.num_vertices(), 3U);
  EXPECT_EQ(sub.num_edges(), 2U);
  for (const auto& e : sub.edges()) EXPECT_EQ(e.cap, 10);
  EXPECT_TRUE(is_bipartite_terminal_network(sub));
  EXPECT_NEAR(lambda_value(sub, unit("s", "t")), 10.0, 1e-9);
}

TEST(GraphCore, SubdivideWithoutTerminalEdgesIsIdentity) {
  TerminalNetwork net({"s", "t", "x"}, {"s", "t"}, {{"s", "x", 2}, {"x", "t", 3}});
  EXPECT_EQ(subdivide_terminal_edges(net), net);
}

TEST(GraphCore, SubdividedTriangleKeepsLambda) {
  TerminalNetwork tri({"a", "b", "c"}, {"a", "b", "c"}, {{"a", "b", 1}, {"b", "c", 1}, {"a", "c", 1}});
  auto sub = subdivide_terminal_edges(tri);
  EXPECT_EQ(sub.num_vertices(), 6U);
  EXPECT_EQ(sub.num_edges(), 6U);
  auto d = unit("a", "b");
  EXPECT_NEAR(edge_lp_lambda(tri, d), 2.0, 1e-9);
  EXPECT_NEAR(edge_lp_lambda(sub, d), 2.0, 1e-9);
  EXPECT_NEAR(lambda_value(sub, d), 2.0, 1e-9);
}

TEST(GraphCore, MergeStarLeaves) {
  TerminalNetwork net({"a", "v1", "v2"}, {"a"}, {{"a", "v1", 1}, {"a", "v2", 2}});
  VertexPartition p{{{"a"}, {"v1", "v2"}}};
  auto merged = merge_vertices(net, p);
  ASSERT_EQ(merged.num_vertices(), 2U);
  ASSERT_EQ(merged.num_edges(), 1U);
  EXPECT_EQ(merged.edges()[0].cap, 3);
  EXPECT_TRUE(merged.find("v1").has_value());
}

TEST(GraphCore, MergeSingletonsIsNormalize) {
  std::mt19937_64 rng(5);
  auto net = random_net(rng, 9, 3, 5);
  EXPECT_EQ(merge_vertices(net, VertexPartition::singletons(net)), normalize(net));
}

TEST(GraphCore, MergeRejectsTwoTerminals) {
  TerminalNetwork net({"s", "t"}, {"s", "t"}, {{"s", "t", 1}});
  EXPECT_THROW(merge_vertices(net, VertexPartition{{{"s", "t"}}}), InputError);
  EXPECT_THROW(merge_vertices(net, VertexPartition{{{"s"}}}), InputError);
}

TEST(GraphCore, MergingIdenticalMiddlesKeepsLambda) {
  TerminalNetwork net({"a", "b", "c", "x", "y"}, {"a", "b", "c"},
                      {{"a", "x", 2}, {"b", "x", 3}, {"c", "x", 1}, {"a", "y", 2}, {"b", "y", 3}, {"c", "y", 1}});
  auto merged = merge_vertices(net, VertexPartition{{{"a"}, {"b"}, {"c"}, {"x", "y"}}});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    auto d = random_demand(rng, net);
    EXPECT_LT(rel_diff(edge_lp_lambda(net, d), edge_lp_lambda(merged, d)), 1e-7);
  }
}

TEST(GraphCore, MergeOnlyIncreasesLambda) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto net = random_net(rng, 9, 3, 6);
    VertexPartition p;
    for (Vertex t : net.terminals()) p.blocks.push_back({net.id(t)});
    std::vector<VertexId> a, b;
    for (Vertex v = 0; v < net.num_vertices(); ++v)
      if (!net.is_terminal(v)) (v % 2 ? a : b).push_back(net.id(v));
    p.blocks.push_back(a);
    p.blocks.push_back(b);
    auto merged = merge_vertices(net, p);
    auto d = random_demand(rng, net);
    EXPECT_GE(lambda_value(merged, d), lambda_value(net, d) * (1 - 1e-7));
  }
}

TEST(GraphCore, PhiMergeSeries) {
  TerminalNetwork g1({"s", "x"}, {"s", "x"}, {{"s", "x", 3}});
  TerminalNetwork g2({"x'", "t"}, {"x'", "t"}, {{"x'", "t", 5}});
  auto g = phi_merge(g1, g2, {{"x", "x'"}});
  EXPECT_EQ(g.num_vertices(), 3U);
  EXPECT_EQ(g.terminal_ids(), (std::vector<VertexId>{"s", "x", "t"}));
  EXPECT_NEAR(lambda_value(g, unit("s", "t")), 3.0, 1e-9);
}

TEST(GraphCore, PhiMergeParallel) {
  TerminalNetwork g1({"s", "t"}, {"s", "t"}, {{"s", "t", 3}});
  TerminalNetwork g2({"s'", "t'"}, {"s'", "t'"}, {{"s'", "t'", 5}});
  auto g = phi_merge(g1, g2, {{"s", "s'"}, {"t", "t'"}});
  ASSERT_EQ(g.num_edges(), 1U);
  EXPECT_EQ(g.edges()[0].cap, 8);
}

TEST(GraphCore, PhiMergeTerminalCount) {
  TerminalNetwork g1({"a", "b", "c", "x"}, {"a", "b", "c"}, {{"a", "x", 1}, {"b", "x", 1}, {"c", "x", 1}});
  TerminalNetwork g2({"c2", "d", "e", "y"}, {"c2", "d", "e"}, {{"c2", "y", 1}, {"d", "y", 1}, {"e", "y", 1}});
  auto g = phi_merge(g1, g2, {{"c", "c2"}});
  EXPECT_EQ(g.num_terminals(), 5U);
  EXPECT_TRUE(g.connected());
}

TEST(GraphCore, PhiMergeErrors) {
  TerminalNetwork g1({"s", "x"}, {"s"}, {{"s", "x", 3}});
  TerminalNetwork g2({"a", "b"}, {"a", "b"}, {{"a", "b", 5}});
  EXPECT_THROW(phi_merge(g1, g2, {{"x", "a"}}), InputError);
  TerminalNetwork g3({"s", "y"}, {"s", "y"}, {{"s", "y", 3}});
  EXPECT_THROW(phi_merge(g3, g2, {{"s", "a"}, {"y", "a"}}), InputError);
}

TEST(GraphCore, PhiMergeSymmetricUpToRenaming) {
  std::mt19937_64 rng(23);
  auto g1 = random_net(rng, 6, 3, 3);
  auto g2raw = random_net(rng, 6, 3, 3);
  std::vector<VertexId> ids;
  for (const auto& id : g2raw.ids()) ids.push_back("q" + id);
  std::vector<NamedEdge> edges;
  for (const auto& e : g2raw.named_edges()) edges.push_back({"q" + e.u, "q" + e.v, e.cap});
  std::vector<VertexId> terms;
  for (const auto& t : g2raw.terminal_ids()) terms.push_back("q" + t);
  TerminalNetwork g2(ids, terms, edges);
  TerminalMap phi{{"t0", "qt0"}, {"t1", "qt1"}};
  TerminalMap inv{{"qt0", "t0"}, {"qt1", "t1"}};
  auto a = phi_merge(g1, g2, phi);
  auto b = phi_merge(g2, g1, inv);
  EXPECT_EQ(a.num_vertices(), b.num_vertices());
  EXPECT_EQ(a.num_edges(), b.num_edges());
  DemandVector d;
  d.set("t0", "t2", 1.0);
  d.set("t1", "qt2", 0.5);
  DemandVector d2;
  d2.set("qt0", "t2", 1.0);
  d2.set("qt1", "qt2", 0.5);
  EXPECT_LT(rel_diff(lambda_value(a, d), lambda_value(b, d2)), 1e-7);
}

TEST(GraphCore, ComponentsAfterTerminalRemoval) {
  TerminalNetwork qb({"a", "b", "x1", "x2", "x3", "x4"}, {"a", "b"},
                     {{"a", "x1", 1}, {"b", "x1", 1}, {"a", "x2", 1}, {"b", "x3", 1}, {"a", "x4", 1}});
  auto comps = components_after_terminal_removal(qb);
  EXPECT_EQ(comps.size(), 4U);
  for (const auto& c : comps) EXPECT_EQ(c.size(), 1U);
  EXPECT_TRUE(is_quasi_bipartite(qb));

  TerminalNetwork path({"s", "u", "v", "t"}, {"s", "t"}, {{"s", "u", 1}, {"u", "v", 1}, {"v", "t", 1}});
  auto pc = components_after_terminal_removal(path);
  ASSERT_EQ(pc.size(), 1U);
  EXPECT_EQ(pc[0].size(), 2U);

  TerminalNetwork all({"s", "t"}, {"s", "t"}, {{"s", "t", 1}});
  EXPECT_TRUE(components_after_terminal_removal(all).empty());
}

TEST(GraphCore, RandomGraphSurgeriesPreserveLambda) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = random_net(rng, 8, 3, 6);
    auto sub = subdivide_terminal_edges(net);
    auto norm = normalize(net);
    for (int i = 0; i < 20; ++i) {
      auto d = random_demand(rng, net);
      double base = lambda_value(net, d);
      EXPECT_LT(rel_diff(base, lambda_value(sub, d)), 1e-6);
      EXPECT_LT(rel_diff(base, lambda_value(norm, d)), 1e-6);
    }
  }
}

TEST(GraphCore, DemandVectorBasics) {
  DemandVector d;
  d.set("b", "a", 2);
  EXPECT_EQ(d.get("a", "b"), 2);
  d.set("a", "b", 0);
  EXPECT_TRUE(d.is_zero());
  EXPECT_THROW(d.set("a", "a", 1), InputError);
  EXPECT_THROW(d.set("a", "b", -1), InputError);
}
