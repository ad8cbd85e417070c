#pragma once

// Merge-based sparsifiers: clumping along a vertex partition, partition
// refinement, and the two quasi-bipartite constructions (length-profile
// buckets and capacity-ratio types).

#include "flowsparse/flow_lp.hpp"
#include "flowsparse/parallel.hpp"

#include <climits>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <vector>

namespace flowsparse {

/// Merges every block of the partition; the quality claim is recorded, not checked.
inline Sparsifier clump(const TerminalNetwork& net, const VertexPartition& partition, double claimed_quality = 1.0) {
  Sparsifier out{merge_vertices(net, partition), "clump", claimed_quality, {}, {}};
  out.params["blocks"] = std::to_string(partition.canonical().blocks.size());
  return out;
}

/// Coarsest common refinement: two vertices share a block iff they share a
/// block in every input partition.
inline VertexPartition refine_partitions(const std::vector<VertexPartition>& parts) {
  if (parts.empty()) return {};
  std::map<VertexId, std::vector<std::size_t>> key;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto canon = parts[p].canonical();
    std::size_t count = 0;
    for (std::size_t b = 0; b < canon.blocks.size(); ++b) {
      for (const auto& id : canon.blocks[b]) {
        auto& k = key[id];
        if (k.size() != p) throw InputError("partitions cover different vertex sets or overlap");
        k.push_back(b);
        ++count;
      }
    }
    if (p > 0 && count != key.size()) throw InputError("partitions cover different vertex sets");
  }
  std::map<std::vector<std::size_t>, std::vector<VertexId>> groups;
  for (const auto& [id, k] : key) {
    if (k.size() != parts.size()) throw InputError("partitions cover different vertex sets");
    groups[k].push_back(id);
  }
  VertexPartition out;
  for (auto& [k, ids] : groups) out.blocks.push_back(std::move(ids));
  return out.canonical();
}

// ---------------------------------------------------------------------------
// Exact powers of (1 + eps)

/// Exact rational form of a decimal accuracy parameter (0.1 -> 1/10).
inline Rational exact_epsilon(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", eps);
  return parse_rational(buf);
}

inline Rational rational_pow(const Rational& base, long e) {
  Rational result = 1, b = e < 0 ? Rational(1) / base : base;
  for (unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e); n; n >>= 1) {
    if (n & 1U) result *= b;
    b *= b;
  }
  return result;
}

/// Largest j with base^j <= x (x > 0), and base^j itself.
inline std::pair<long, Rational> floor_power(const Rational& x, const Rational& base) {
  long j = static_cast<long>(std::floor(std::log(to_double(x)) / std::log(to_double(base))));
  Rational p = rational_pow(base, j);
  while (p > x) {
    p /= base;
    --j;
  }
  while (p * base <= x) {
    p *= base;
    ++j;
  }
  return {j, p};
}

/// Every positive capacity rounded down to an integer power of (1 + eps).
inline TerminalNetwork round_capacities_down(const TerminalNetwork& net, double eps) {
  const Rational base = 1 + exact_epsilon(eps);
  auto edges = net.named_edges();
  for (auto& e : edges)
    if (e.cap > 0) e.cap = floor_power(e.cap, base).second;
  return TerminalNetwork(net.ids(), net.terminal_ids(), edges, {.allow_disconnected = net.allows_disconnected()});
}

// ---------------------------------------------------------------------------
// Length-profile buckets

/// Profile entry of a terminal not adjacent to the vertex.
constexpr long kAbsentEntry = LONG_MIN;
/// Profile entry of a length rounded to zero.
constexpr long kZeroEntry = LONG_MIN + 1;

using LengthProfile = std::vector<long>;

namespace detail {

inline void require_independent_terminals(const TerminalNetwork& net) {
  if (!is_bipartite_terminal_network(net))
    throw StructureError("network must be quasi-bipartite with independent terminals");
}

}  // namespace detail

/// Profiles of all non-terminals under one demand: the canonical dual edge
/// lengths are rounded down into Gamma^eps, the set of zero and the powers of
/// (1 + eps) lying in some [eps * delta_st, delta_st]. Lengths below every
/// such power become zero. Entries are the exponents j of (1+eps)^j; the
/// uniform (1+eps)/(1-eps)^2 rescaling leaves them comparable as they are.
inline std::map<Vertex, LengthProfile> length_profiles(const TerminalNetwork& net, double eps, const DemandVector& d) {
  detail::require_independent_terminals(net);
  auto res = lambda(net, d);
  const double base = 1 + eps;
  const double lb = std::log(base);
  std::vector<long> grid;
  for (double delta : res.dual.distances) {
    if (!(delta > 0) || delta == kInfinity) continue;
    long lo = static_cast<long>(std::ceil(std::log(eps * delta) / lb - 1e-9));
    long hi = static_cast<long>(std::floor(std::log(delta) / lb + 1e-9));
    for (long j = lo; j <= hi; ++j) grid.push_back(j);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto round_entry = [&](double len) {
    if (len <= 0 || grid.empty()) return kZeroEntry;
    double x = std::log(len) / lb + 1e-9;
    auto it = std::upper_bound(grid.begin(), grid.end(), x, [](double v, long j) { return v < static_cast<double>(j); });
    if (it == grid.begin()) return kZeroEntry;
    return *std::prev(it);
  };
  std::map<Vertex, LengthProfile> out;
  const std::size_t k = net.num_terminals();
  for (Vertex v = 0; v < net.num_vertices(); ++v) {
    if (net.is_terminal(v)) continue;
    LengthProfile prof(k, kAbsentEntry);
    for (const auto& [w, e] : net.adjacency()[v]) prof[net.terminal_position(w)] = round_entry(res.dual.lengths[e]);
    out.emplace(v, std::move(prof));
  }
  return out;
}

/// Partition of the vertices putting non-terminals with equal profiles together.
inline VertexPartition bucket_partition(const TerminalNetwork& net, const std::map<Vertex, LengthProfile>& profiles) {
  std::map<LengthProfile, std::vector<VertexId>> buckets;
  VertexPartition out;
  for (Vertex v = 0; v < net.num_vertices(); ++v) {
    if (net.is_terminal(v))
      out.blocks.push_back({net.id(v)});
    else
      buckets[profiles.at(v)].push_back(net.id(v));
  }
  for (auto& [p, ids] : buckets) out.blocks.push_back(std::move(ids));
  return out.canonical();
}

/// Clumping sparsifier for quasi-bipartite networks: bucket non-terminals by
/// rounded dual length profile for every demand of the set, refine the
/// bucketings, and merge. Terminal-terminal edges are subdivided first.
inline Sparsifier profile_bucket_sparsifier(const TerminalNetwork& input, double eps,
                                            const std::vector<DemandVector>& demands,
                                            std::uint64_t budget = enumeration_budget(), std::size_t jobs = 1) {
  if (!(eps > 0 && eps < 1)) throw InputError("epsilon must lie in (0, 1)");
  if (demands.empty()) throw InputError("profile bucketing needs at least one demand");
  if (demands.size() > budget)
    throw BudgetExceeded("demand set has " + std::to_string(demands.size()) + " vectors, over the budget of " +
                         std::to_string(budget));
  auto net = subdivide_terminal_edges(input);
  detail::require_independent_terminals(net);
  std::vector<VertexPartition> parts(demands.size());
  parallel_for(demands.size(), jobs, [&](std::size_t i) {
    parts[i] = bucket_partition(net, length_profiles(net, eps, demands[i]));
  });
  auto partition = refine_partitions(parts);
  const double q = (1 + 3 * eps) * (1 + 5 * eps);
  Sparsifier out = clump(net, partition, q);
  out.method = "profile-bucket";
  out.params["eps"] = std::to_string(eps);
  out.params["demands"] = std::to_string(demands.size());
  return out;
}

// ---------------------------------------------------------------------------
// Capacity-ratio types

/// Ratio entry that hit the cap M.
constexpr long kCappedRatio = LONG_MAX;

struct RatioType {
  /// Terminal positions with positive capacity to the vertex, ascending.
  std::vector<std::size_t> super_type;
  /// Exponents of consecutive capacity ratios (capacities sorted descending,
  /// ties by terminal id), or kCappedRatio where the ratio exceeds the cap.
  std::vector<long> ratios;

  friend bool operator<(const RatioType& a, const RatioType& b) {
    return std::tie(a.super_type, a.ratios) < std::tie(b.super_type, b.ratios);
  }
  friend bool operator==(const RatioType& a, const RatioType& b) {
    return a.super_type == b.super_type && a.ratios == b.ratios;
  }
};

/// Cap k^2/eps + 1 on ratio entries.
inline Rational ratio_cap(std::size_t k, double eps) {
  return Rational(static_cast<long>(k * k)) / exact_epsilon(eps) + 1;
}

/// Type of non-terminal v in a network whose capacities are powers of 1+eps.
inline RatioType ratio_type(const TerminalNetwork& rounded, Vertex v, double eps) {
  const Rational base = 1 + exact_epsilon(eps);
  const Rational cap = ratio_cap(rounded.num_terminals(), eps);
  struct Entry {
    Rational c;
    VertexId id;
    std::size_t pos;
    long exponent;
  };
  std::vector<Entry> entries;
  for (const auto& [w, e] : rounded.adjacency()[v]) {
    const Rational& c = rounded.edges()[e].cap;
    if (!rounded.is_terminal(w) || c <= 0) continue;
    entries.push_back(Entry{c, rounded.id(w), static_cast<std::size_t>(rounded.terminal_position(w)), floor_power(c, base).first});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.c != b.c ? a.c > b.c : a.id < b.id; });
  RatioType t;
  for (const auto& en : entries) t.super_type.push_back(en.pos);
  std::sort(t.super_type.begin(), t.super_type.end());
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    Rational r = entries[i].c / entries[i + 1].c;
    t.ratios.push_back(r > cap ? kCappedRatio : entries[i].exponent - entries[i + 1].exponent);
  }
  return t;
}

/// Type-merge sparsifier for quasi-bipartite networks with independent
/// terminals: capacities are rounded down to powers of 1+eps, non-terminals
/// with equal (super-type, capped ratio vector) are merged, and all
/// capacities are scaled by 1+eps so the result dominates the input.
inline Sparsifier ratio_type_sparsifier(const TerminalNetwork& net, double eps) {
  if (!(eps > 0 && eps < 1)) throw InputError("epsilon must lie in (0, 1)");
  detail::require_independent_terminals(net);
  auto rounded = round_capacities_down(net, eps);
  std::map<RatioType, std::vector<VertexId>> groups;
  VertexPartition partition;
  for (Vertex v = 0; v < rounded.num_vertices(); ++v) {
    if (rounded.is_terminal(v))
      partition.blocks.push_back({rounded.id(v)});
    else
      groups[ratio_type(rounded, v, eps)].push_back(rounded.id(v));
  }
  for (auto& [t, ids] : groups) partition.blocks.push_back(std::move(ids));
  auto merged = merge_vertices(rounded, partition.canonical());
  Sparsifier out{scale_capacities(merged, 1 + exact_epsilon(eps)), "ratio-type", 1 + 5 * eps, {}, {}};
  out.params["eps"] = std::to_string(eps);
  out.params["types"] = std::to_string(groups.size());
  out.notes.push_back("claimed quality 1+5eps is the empirical constant; capacities scaled by 1+eps after merging");
  return out;
}

}  // namespace flowsparse
