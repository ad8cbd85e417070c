#include "flowsparse/merging.hpp"
#include "flowsparse/verify.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace flowsparse;
using namespace fs_test;

namespace {

// Terminals a, b, c; middle vertices given by their capacity rows.
TerminalNetwork star_of_stars(const std::vector<std::array<int, 3>>& rows) {
  std::vector<VertexId> ids{"a", "b", "c"};
  std::vector<NamedEdge> edges;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ids.push_back(vname(i));
    for (std::size_t t = 0; t < 3; ++t)
      if (rows[i][t] > 0) edges.push_back({ids.back(), ids[t], Rational(rows[i][t])});
  }
  return TerminalNetwork(ids, {"a", "b", "c"}, edges);
}

std::vector<VertexId> block_with(const VertexPartition& p, const VertexId& id) {
  for (const auto& b : p.blocks)
    if (std::find(b.begin(), b.end(), id) != b.end()) return b;
  return {};
}

}  // namespace

TEST(Clump, DelegatesToMergeAndRecordsClaim) {
  TerminalNetwork net({"a", "v1", "v2"}, {"a"}, {{"a", "v1", 1}, {"a", "v2", 2}});
  auto out = clump(net, VertexPartition{{{"a"}, {"v1", "v2"}}}, 1.5);
  EXPECT_EQ(out.net.num_vertices(), 2U);
  EXPECT_EQ(out.net.edges()[0].cap, 3);
  EXPECT_DOUBLE_EQ(out.claimed_quality, 1.5);
  EXPECT_THROW(clump(net, VertexPartition{{{"a", "v1"}}}), InputError);
}

TEST(RefinePartitions, Examples) {
  VertexPartition p{{{"1", "2"}, {"3"}}}, q{{{"1"}, {"2", "3"}}};
  VertexPartition singles{{{"1"}, {"2"}, {"3"}}};
  EXPECT_EQ(refine_partitions({p, q}), singles);
  EXPECT_EQ(refine_partitions({p, p}), p);
  EXPECT_EQ(refine_partitions({singles, p}), singles);
  EXPECT_THROW(refine_partitions({p, VertexPartition{{{"1", "2"}}}}), InputError);
}

TEST(RefinePartitions, BlockCountAtMostProduct) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<VertexPartition> parts(3);
    std::size_t product = 1;
    for (auto& p : parts) {
      std::size_t m = 1 + rng() % 4;
      p.blocks.resize(m);
      for (int v = 0; v < 12; ++v) p.blocks[rng() % m].push_back(std::to_string(v));
      product *= p.canonical().blocks.size();
    }
    auto r = refine_partitions(parts);
    EXPECT_LE(r.blocks.size(), product);
    // Same block in r iff same block in every input.
    for (int u = 0; u < 12; ++u)
      for (int v = 0; v < 12; ++v) {
        bool together = true;
        for (const auto& p : parts) {
          auto b = block_with(p, std::to_string(u));
          together &= std::find(b.begin(), b.end(), std::to_string(v)) != b.end();
        }
        auto b = block_with(r, std::to_string(u));
        EXPECT_EQ(together, std::find(b.begin(), b.end(), std::to_string(v)) != b.end());
      }
  }
}

TEST(ExactPowers, FloorPower) {
  Rational base(5, 4);
  auto [j, p] = floor_power(Rational(2), base);
  EXPECT_EQ(j, 3);
  EXPECT_EQ(p, Rational(125, 64));
  EXPECT_EQ(floor_power(Rational(25, 16), base).first, 2);
  EXPECT_EQ(floor_power(Rational(1, 2), base).first, -4);
  EXPECT_EQ(exact_epsilon(0.1), Rational(1, 10));
}

TEST(ProfileBucket, IdenticalRowsMerge) {
  auto net = star_of_stars({{2, 3, 1}, {2, 3, 1}, {5, 1, 4}});
  DemandVector d;
  d.set("a", "b", 1);
  d.set("b", "c", 0.5);
  auto part = bucket_partition(net, length_profiles(net, 0.1, d));
  auto b = block_with(part, "v0");
  EXPECT_NE(std::find(b.begin(), b.end(), "v1"), b.end());
  auto out = profile_bucket_sparsifier(net, 0.1, {d});
  EXPECT_LE(out.net.num_vertices(), 5U);
  EXPECT_GE(out.net.capacity_between(out.net.index_of("a"), out.net.index_of("v0")), 4);
}

TEST(ProfileBucket, SingleMiddleUnchanged) {
  auto net = star_of_stars({{2, 3, 1}});
  DemandVector d;
  d.set("a", "b", 1);
  auto out = profile_bucket_sparsifier(net, 0.1, {d});
  EXPECT_EQ(out.net, normalize(net));
}

TEST(ProfileBucket, RejectsNonQuasiBipartite) {
  TerminalNetwork net({"a", "b", "x", "y"}, {"a", "b"}, {{"a", "x", 1}, {"x", "y", 1}, {"y", "b", 1}});
  DemandVector d;
  d.set("a", "b", 1);
  EXPECT_THROW(profile_bucket_sparsifier(net, 0.1, {d}), StructureError);
  EXPECT_THROW(profile_bucket_sparsifier(net, 0.1, {d, d}, 1), BudgetExceeded);
}

TEST(ProfileBucket, StarOfStarsQualityBound) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> cap(0, 6);
  std::vector<std::array<int, 3>> rows;
  for (int i = 0; i < 14; ++i) {
    std::array<int, 3> r{cap(rng), cap(rng), cap(rng)};
    if (r[0] + r[1] + r[2] == 0 || (r[0] > 0) + (r[1] > 0) + (r[2] > 0) < 2) r = {1, 1, 1};
    rows.push_back(r);
  }
  auto net = star_of_stars(rows);
  const double eps = 0.1;
  auto build = demand_grid(net, DemandGridSpec::disc(eps, 0.1, 40, 3));
  auto out = profile_bucket_sparsifier(net, eps, build);
  EXPECT_LT(out.net.num_vertices(), net.num_vertices());
  auto test = demand_grid(net, DemandGridSpec::random(50, 9));
  for (const auto& d : test) {
    double a = edge_lp_lambda(net, d), b = edge_lp_lambda(out.net, d);
    EXPECT_GE(b, a * (1 - 1e-6));
    EXPECT_LE(b, (1 + 3 * eps) * (1 + 5 * eps) * a * (1 + 1e-6));
  }
}

TEST(ProfileBucket, BucketingIsAnEquivalence) {
  // Profiles are compared as values, so the relation is an equivalence; check
  // that the partition is consistent with pairwise profile equality.
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = random_quasi_bipartite(rng, 3, 10);
    auto d = random_demand(rng, net);
    auto prof = length_profiles(net, 0.2, d);
    auto part = bucket_partition(net, prof);
    for (const auto& [u, pu] : prof)
      for (const auto& [v, pv] : prof) {
        auto b = block_with(part, net.id(u));
        EXPECT_EQ(pu == pv, std::find(b.begin(), b.end(), net.id(v)) != b.end());
      }
  }
}

TEST(RatioType, ProportionalRowsShareAType) {
  auto net = star_of_stars({{1, 2, 4}, {2, 4, 8}, {4, 8, 16}, {3, 0, 5}});
  auto out = ratio_type_sparsifier(net, 0.25);
  // One merged vertex for the proportional rows, one for {a,c}.
  EXPECT_EQ(out.net.num_vertices(), 5U);
}

TEST(RatioType, SingleMiddleIsRoundedAndScaled) {
  auto net = star_of_stars({{3, 7, 1}});
  auto out = ratio_type_sparsifier(net, 0.25);
  auto rounded = round_capacities_down(net, 0.25);
  EXPECT_EQ(out.net, scale_capacities(rounded, Rational(5, 4)));
  for (const auto& e : rounded.edges()) {
    auto [j, p] = floor_power(e.cap, Rational(5, 4));
    EXPECT_EQ(p, e.cap);
  }
}

TEST(RatioType, TypeTieBreakAndCap) {
  auto net = star_of_stars({{4, 4, 1}, {1, 1000, 1}});
  auto rounded = round_capacities_down(net, 0.5);
  auto t0 = ratio_type(rounded, rounded.index_of("v0"), 0.5);
  EXPECT_EQ(t0.super_type, (std::vector<std::size_t>{0, 1, 2}));
  ASSERT_EQ(t0.ratios.size(), 2U);
  EXPECT_EQ(t0.ratios[0], 0);
  EXPECT_GE(t0.ratios[1], 1);
  auto t1 = ratio_type(rounded, rounded.index_of("v1"), 0.5);
  // 1000 / 1 exceeds the cap 9/0.5 + 1 = 19.
  EXPECT_EQ(t1.ratios[0], kCappedRatio);
  EXPECT_EQ(t1.ratios[1], 0);
}

TEST(RatioType, RoundingAloneWithinFactor) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = random_quasi_bipartite(rng, 3, 8);
    auto rounded = round_capacities_down(net, 0.25);
    for (int i = 0; i < 10; ++i) {
      auto d = random_demand(rng, net);
      double a = edge_lp_lambda(net, d), b = edge_lp_lambda(rounded, d);
      EXPECT_LE(b, a * (1 + 1e-6));
      EXPECT_GE(b, a / 1.25 * (1 - 1e-6));
    }
  }
}

TEST(RatioType, MergedDominatesAndStaysClose) {
  std::mt19937_64 rng(21);
  const double eps = 0.25;
  for (int trial = 0; trial < 3; ++trial) {
    auto net = random_quasi_bipartite(rng, 4, 25);
    auto out = ratio_type_sparsifier(net, eps);
    EXPECT_LE(out.net.num_vertices(), net.num_vertices());
    auto rep = certify(net, out.net, demand_grid(net, DemandGridSpec::disc(eps, 0.1, 40, trial)), 1 + 5 * eps);
    EXPECT_LE(rep.lower, 1 + 1e-6);
    EXPECT_TRUE(rep.pass) << rep.upper;
  }
}

TEST(RatioType, SizeBound) {
  std::mt19937_64 rng(4);
  auto net = random_quasi_bipartite(rng, 3, 200, 100);
  const double eps = 0.5;
  auto out = ratio_type_sparsifier(net, eps);
  const double bound = std::pow(2.0, 3) * std::pow(9 / eps + 1, 3) + 3;
  EXPECT_LE(static_cast<double>(out.net.num_vertices()), bound);
  EXPECT_LT(out.net.num_vertices(), net.num_vertices());
}
