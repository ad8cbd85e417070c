#include "flowsparse/generators.hpp"
#include "flowsparse/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace flowsparse;
using namespace fs_test;
namespace fio = flowsparse::io;

TEST(IoNumbers, RationalRoundTrip) {
  EXPECT_EQ(fio::rational_to_json(Rational(7)), fio::json(7));
  EXPECT_EQ(fio::rational_to_json(Rational(1) / 3), fio::json("1/3"));
  EXPECT_EQ(fio::rational_from_json(fio::json("2/6")), Rational(1) / 3);
  EXPECT_EQ(fio::rational_from_json(fio::json::parse("0.1")), Rational(1) / 10);
  EXPECT_EQ(fio::rational_from_json(fio::json(5)), Rational(5));
  EXPECT_THROW(fio::rational_from_json(fio::json(true)), InputError);
}

TEST(IoNetwork, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  auto g = random_net(rng, 10, 3, 8);
  g = scale_capacities(g, Rational(2) / 7);
  auto back = fio::network_from_json(fio::json::parse(fio::network_to_json(g).dump()));
  EXPECT_EQ(back, g);
}

TEST(IoNetwork, MetaRoundTrip) {
  std::mt19937_64 rng(2);
  Sparsifier s{random_net(rng, 6, 2, 2), "clump", 1.5, {{"blocks", "4"}}, {"a note"}};
  auto back = fio::sparsifier_from_json(fio::sparsifier_to_json(s));
  EXPECT_EQ(back.net, s.net);
  EXPECT_EQ(back.method, "clump");
  EXPECT_DOUBLE_EQ(back.claimed_quality, 1.5);
  EXPECT_EQ(back.params.at("blocks"), "4");
  EXPECT_EQ(back.notes, s.notes);
}

TEST(IoNetwork, MalformedInputs) {
  EXPECT_THROW(fio::network_from_json(fio::json::parse(R"({"vertices":["a"]})")), InputError);
  EXPECT_THROW(fio::network_from_json(fio::json::parse(
                   R"({"vertices":["a","b"],"terminals":["a"],"edges":[{"u":"a","v":"c","cap":1}]})")),
               InputError);
  EXPECT_THROW(fio::network_from_json(fio::json::parse(
                   R"({"vertices":["a","b"],"terminals":["a"],"edges":[{"u":"a","v":"b","cap":"x"}]})")),
               InputError);
  EXPECT_THROW(fio::parse_json("{", "test"), InputError);
}

TEST(IoDemand, RoundTrip) {
  DemandVector d;
  d.set("a", "b", 1.5);
  d.set("c", "a", 2);
  auto back = fio::demand_from_json(fio::demand_to_json(d));
  EXPECT_EQ(back, d);
  auto many = fio::demands_from_json(fio::json::array({fio::demand_to_json(d), fio::demand_to_json(d)}));
  EXPECT_EQ(many.size(), 2U);
  EXPECT_THROW(fio::demand_from_json(fio::json::parse(R"([{"s":"a","t":"a","d":1}])")), InputError);
}

TEST(IoDimacs, ImportWithAndWithoutSidecar) {
  const std::string text =
      "c tiny\np max 4 5\nn 1 s\nn 4 t\na 1 2 3\na 2 1 2\na 2 4 4\na 1 3 1\na 3 4 7\n";
  auto g = fio::network_from_dimacs(text);
  EXPECT_EQ(g.terminal_ids(), (std::vector<VertexId>{"1", "4"}));
  EXPECT_EQ(g.num_edges(), 4U);
  EXPECT_EQ(g.capacity_between(g.index_of("1"), g.index_of("2")), 5);
  auto h = fio::network_from_dimacs(text, fio::terminals_from_sidecar("1 2 4"));
  EXPECT_EQ(h.num_terminals(), 3U);
  EXPECT_EQ(fio::terminals_from_sidecar(R"(["1", "3"])"), (std::vector<VertexId>{"1", "3"}));
  EXPECT_THROW(fio::network_from_dimacs("p max 2 1\na 1 5 1\n"), InputError);
  EXPECT_THROW(fio::network_from_dimacs("a 1 2 1\n"), InputError);
}

TEST(IoSpTree, RoundTrip) {
  auto inst = gen::series_parallel(15, 3, 4);
  auto back = fio::sptree_from_json(fio::sptree_to_json(inst.tree));
  EXPECT_EQ(back.realize(inst.net.terminal_ids()), inst.tree.realize(inst.net.terminal_ids()));
  auto bad = fio::sptree_to_json(inst.tree);
  bad["nodes"][0]["kind"] = "triangle";
  EXPECT_THROW(fio::sptree_from_json(bad), InputError);
}

TEST(IoTdec, RoundTrip) {
  auto inst = gen::random_two_tree(12, 4, 5);
  auto back = fio::tdec_from_json(fio::tdec_to_json(inst.tdec));
  EXPECT_EQ(back.bags, inst.tdec.bags);
  EXPECT_EQ(back.edges, inst.tdec.edges);
  back.validate(inst.net);
}

TEST(IoSketch, RoundTripAnswersAlike) {
  TerminalNetwork g({"a", "b", "m"}, {"a", "b"}, {{"a", "m", 3}, {"m", "b", 5}, {"a", "b", 1}});
  auto sk = build_sketch(g, 0.3);
  auto back = fio::sketch_from_json(fio::json::parse(fio::sketch_to_json(sk).dump()));
  EXPECT_EQ(back.dict, sk.dict);
  EXPECT_EQ(back.L, sk.L);
  DemandVector d;
  d.set("a", "b", 2);
  EXPECT_DOUBLE_EQ(sketch_query(back, d), sketch_query(sk, d));
}

TEST(IoManifest, HashesAreStable) {
  EXPECT_EQ(fio::hash_hex("abc"), fio::hash_hex("abc"));
  EXPECT_NE(fio::hash_hex("abc"), fio::hash_hex("abd"));
  fio::RunManifest m;
  m.command = "gen";
  m.seed = 3;
  auto j = m.to_json();
  EXPECT_EQ(j.at("command"), "gen");
  EXPECT_EQ(j.at("seed"), 3);
  EXPECT_TRUE(j.contains("tool_version"));
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(gen::quasi_bipartite(5, 50, 1), gen::quasi_bipartite(5, 50, 1));
  EXPECT_FALSE(gen::quasi_bipartite(5, 50, 1) == gen::quasi_bipartite(5, 50, 2));
  EXPECT_TRUE(is_bipartite_terminal_network(gen::quasi_bipartite(5, 50, 1)));
}

TEST(Generators, SpDepthHasPowerOfTwoLeaves) {
  auto inst = gen::series_parallel_depth(4, 3, 9);
  EXPECT_EQ(inst.tree.leaves(inst.tree.root).size(), 16U);
  inst.tree.validate();
}

TEST(Generators, BoundedComponents) {
  auto g = gen::bounded_components(4, 30, 3, 2);
  for (const auto& c : components_after_terminal_removal(g)) EXPECT_LE(c.size(), 3U);
}
