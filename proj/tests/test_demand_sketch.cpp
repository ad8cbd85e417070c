#include "flowsparse/demand_sketch.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace flowsparse;
using namespace fs_test;

namespace {

TerminalNetwork triangle() {
  return TerminalNetwork({"a", "b", "c"}, {"a", "b", "c"}, {{"a", "b", 1}, {"b", "c", 1}, {"a", "c", 1}});
}

}  // namespace

TEST(Sketch, SingleEdgeDictionary) {
  TerminalNetwork net({"s", "t"}, {"s", "t"}, {{"s", "t", 10}});
  auto sk = build_sketch(net, 0.1);
  EXPECT_EQ(sk.L[0], 10);
  // Every grid value in [eps'/4 * 10, 10] is feasible; oracle recount.
  auto [lo, hi] = sk.exponent_range(0);
  std::size_t expected = 0;
  for (int e = lo; e <= hi; ++e) {
    double v = std::pow(sk.ratio(), e);
    EXPECT_GE(v, sk.epsilon_internal / 4 * 10 * (1 - 1e-12));
    if (v <= 10 * (1 + 1e-12)) ++expected;
  }
  EXPECT_EQ(sk.dict.size(), expected);
  EXPECT_FALSE(sk.dict.count({kZeroExponent}));
}

TEST(Sketch, SingleEdgeQuery) {
  TerminalNetwork net({"s", "t"}, {"s", "t"}, {{"s", "t", 10}});
  auto sk = build_sketch(net, 0.1);
  DemandVector d;
  d.set("s", "t", 1);
  double v = sketch_query(sk, d);
  EXPECT_GE(v, 10 / 1.1);
  EXPECT_LE(v, 11);
  EXPECT_THROW(sketch_query(sk, DemandVector{}), InputError);
}

TEST(Sketch, TriangleSingleCoordinates) {
  auto net = triangle();
  auto sk = build_sketch(net, 0.3);
  for (std::size_t p = 0; p < 3; ++p) {
    EXPECT_EQ(sk.L[p], 2);
    auto [lo, hi] = sk.exponent_range(p);
    for (int e = lo; e <= hi; ++e) {
      std::vector<int> key(3, kZeroExponent);
      key[p] = e;
      EXPECT_TRUE(sk.dict.count(key)) << p << " " << e;
    }
  }
}

TEST(Sketch, TriangleAllOnes) {
  auto net = triangle();
  auto sk = build_sketch(net, 0.3);
  DemandVector d;
  d.set("a", "b", 1);
  d.set("b", "c", 1);
  d.set("a", "c", 1);
  double lam = edge_lp_lambda(net, d);
  EXPECT_NEAR(lam, 1.0, 1e-9);
  double v = sketch_query(sk, d);
  EXPECT_LE(v, lam * 1.3);
  EXPECT_GE(v, lam / 1.3);
}

TEST(Sketch, EveryStoredVectorFeasibleAndOnGrid) {
  std::mt19937_64 rng(8);
  auto net = random_net(rng, 6, 3, 3);
  auto sk = build_sketch(net, 0.3);
  const double kk = 9;
  std::size_t checked = 0;
  for (const auto& key : sk.dict) {
    for (std::size_t p = 0; p < key.size(); ++p) {
      if (key[p] == kZeroExponent) continue;
      double v = sk.value_of(key[p]);
      EXPECT_GE(v, sk.epsilon_internal / kk * to_double(sk.L[p]) * (1 - 1e-9));
      EXPECT_LE(v, to_double(sk.L[p]) * (1 + 1e-9));
    }
    if (checked++ % 97 == 0) EXPECT_GE(edge_lp_lambda(net, detail::sketch_vector(sk, key)), 1 - 1e-6);
  }
  EXPECT_LE(static_cast<double>(sk.dict.size()), sk.storage_bound());
}

TEST(Sketch, Soundness) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    auto net = random_net(rng, 7, 3, 4);
    auto sk = build_sketch(net, 0.25);
    for (int i = 0; i < 30; ++i) {
      auto d = random_demand(rng, net, 0.8);
      double lam = edge_lp_lambda(net, d);
      SketchQueryStats stats;
      double v = sketch_query(sk, d, &stats);
      EXPECT_LE(v, lam * 1.25 * (1 + 1e-9));
      EXPECT_GE(v, lam / 1.25 * (1 - 1e-9));
      EXPECT_LE(stats.probes, 2 + static_cast<std::size_t>(std::ceil(std::log2(std::log(9.0) / std::log(sk.ratio()) + 1))));
    }
  }
}

TEST(Sketch, StoredSetIsDownClosed) {
  std::mt19937_64 rng(10);
  auto net = random_net(rng, 6, 3, 3);
  auto sk = build_sketch(net, 0.3);
  for (const auto& key : sk.dict) {
    for (std::size_t p = 0; p < key.size(); ++p) {
      if (key[p] == kZeroExponent) continue;
      auto lower = key;
      lower[p] = key[p] == sk.exponent_range(p).first ? kZeroExponent : key[p] - 1;
      bool nonzero = false;
      for (int e : lower) nonzero |= e != kZeroExponent;
      if (nonzero) {
        EXPECT_TRUE(sk.dict.count(lower));
      }
    }
  }
}

TEST(Sketch, QueryMonotoneUpToAccuracy) {
  std::mt19937_64 rng(10);
  auto net = random_net(rng, 6, 3, 3);
  auto sk = build_sketch(net, 0.25);
  for (int i = 0; i < 20; ++i) {
    auto d = random_demand(rng, net);
    auto smaller = d;
    auto [key, value] = *d.entries().begin();
    smaller.set(key.first, key.second, value * 0.5);
    EXPECT_GE(sketch_query(sk, smaller), sketch_query(sk, d) / (1.25 * 1.25));
  }
}

TEST(Sketch, BudgetAndEpsilonChecks) {
  std::mt19937_64 rng(11);
  auto net = random_net(rng, 6, 3, 3);
  EXPECT_THROW(build_sketch(net, 0.25, 100), BudgetExceeded);
  EXPECT_THROW(build_sketch(net, 0.6), InputError);
  EXPECT_THROW(build_sketch(net, 0.0), InputError);
}

TEST(Sketch, ParallelBuildMatchesSerial) {
  std::mt19937_64 rng(12);
  auto net = random_net(rng, 6, 3, 3);
  auto a = build_sketch(net, 0.3, enumeration_budget(), 1);
  auto b = build_sketch(net, 0.3, enumeration_budget(), 3);
  EXPECT_EQ(a.dict, b.dict);
}
