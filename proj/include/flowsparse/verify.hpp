#pragma once

// Quality certification of a candidate sparsifier against the concurrent
// flow oracle on a finite demand set, and of cut sparsifiers by bipartition
// min-cut enumeration.

#include "flowsparse/flow_lp.hpp"
#include "flowsparse/maxflow.hpp"
#include "flowsparse/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace flowsparse {

struct DemandGridSpec {
  enum class Kind { Basis, Random, Disc };
  Kind kind = Kind::Basis;
  std::size_t count = 0;       // random: number of vectors; disc: sample size when the grid is larger
  std::uint64_t seed = 0;
  double epsilon = 0.5;        // disc
  double eta = 0.1;            // disc

  static DemandGridSpec basis() { return {}; }
  static DemandGridSpec random(std::size_t n, std::uint64_t seed) { return {Kind::Random, n, seed, 0, 0}; }
  static DemandGridSpec disc(double eps, double eta, std::size_t limit = 200, std::uint64_t seed = 0) {
    return {Kind::Disc, limit, seed, eps, eta};
  }

  [[nodiscard]] std::string describe() const {
    switch (kind) {
      case Kind::Basis:
        return "basis";
      case Kind::Random:
        return "random(" + std::to_string(count) + "," + std::to_string(seed) + ")";
      case Kind::Disc:
        return "disc(" + std::to_string(epsilon) + "," + std::to_string(eta) + ",limit=" + std::to_string(count) +
               ",seed=" + std::to_string(seed) + ")";
    }
    return "";
  }
};

/// Per-pair scale used by the grids: F_st (sum over common neighbours of the
/// smaller incident capacity) on networks where every edge joins a terminal
/// to a non-terminal, the max-flow value L_st otherwise.
inline std::vector<double> pair_scales(const TerminalNetwork& net) {
  auto pairs = terminal_pairs(net);
  std::vector<double> out;
  const bool two_hop = is_bipartite_terminal_network(net);
  for (auto [s, t] : pairs) {
    if (two_hop) {
      Rational f = 0;
      for (const auto& m : detail::common_neighbors(net, s, t))
        f += std::min(net.edges()[m.e_sv].cap, net.edges()[m.e_vt].cap);
      out.push_back(to_double(f));
    } else {
      out.push_back(to_double(max_flow(net, s, t)));
    }
  }
  return out;
}

/// Deterministic demand test set.
///   basis:  L_st * e_st for every pair.
///   random: iid uniform coordinates in (0, 1], scaled so that d_st <= L_st / C(k,2),
///           which is always routable.
///   disc:   coordinates zero or a power of 1+eps in [eta * F_st, F_st]; the
///           whole grid when it has at most `count` nonzero vectors, else
///           `count` uniform draws from it.
inline std::vector<DemandVector> demand_grid(const TerminalNetwork& net, const DemandGridSpec& spec) {
  std::vector<DemandVector> out;
  auto pairs = terminal_pairs(net);
  if (pairs.empty()) return out;
  auto name = [&](std::size_t p) { return std::make_pair(net.id(pairs[p].first), net.id(pairs[p].second)); };
  switch (spec.kind) {
    case DemandGridSpec::Kind::Basis: {
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        DemandVector d;
        auto [s, t] = name(p);
        d.set(s, t, to_double(max_flow(net, pairs[p].first, pairs[p].second)));
        if (!d.is_zero()) out.push_back(std::move(d));
      }
      break;
    }
    case DemandGridSpec::Kind::Random: {
      if (spec.count == 0) break;
      std::vector<double> L;
      for (auto [s, t] : pairs) L.push_back(to_double(max_flow(net, s, t)));
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double share = 1.0 / static_cast<double>(pairs.size());
      while (out.size() < spec.count) {
        DemandVector d;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          double x = 1.0 - u(rng);  // (0, 1]
          auto [s, t] = name(p);
          if (L[p] > 0) d.set(s, t, x * L[p] * share);
        }
        if (d.is_zero()) break;
        out.push_back(std::move(d));
      }
      break;
    }
    case DemandGridSpec::Kind::Disc: {
      if (!(spec.epsilon > 0) || !(spec.eta > 0 && spec.eta <= 1)) throw InputError("disc grid needs eps > 0 and 0 < eta <= 1");
      auto F = pair_scales(net);
      const double lr = std::log1p(spec.epsilon);
      std::vector<std::vector<double>> values(pairs.size());
      long double total = 1;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        values[p].push_back(0.0);
        if (F[p] > 0) {
          long lo = static_cast<long>(std::ceil(std::log(spec.eta * F[p]) / lr - 1e-9));
          long hi = static_cast<long>(std::floor(std::log(F[p]) / lr + 1e-9));
          for (long j = lo; j <= hi; ++j) values[p].push_back(std::pow(1 + spec.epsilon, static_cast<double>(j)));
        }
        total *= static_cast<long double>(values[p].size());
      }
      auto make = [&](const std::vector<std::size_t>& idx) {
        DemandVector d;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          if (idx[p] == 0) continue;
          auto [s, t] = name(p);
          d.set(s, t, values[p][idx[p]]);
        }
        return d;
      };
      if (total - 1 <= static_cast<long double>(spec.count)) {
        std::vector<std::size_t> idx(pairs.size(), 0);
        for (;;) {
          std::size_t p = 0;
          while (p < idx.size() && ++idx[p] == values[p].size()) idx[p++] = 0;
          if (p == idx.size()) break;
          out.push_back(make(idx));
        }
      } else {
        std::mt19937_64 rng(spec.seed);
        std::set<std::vector<std::size_t>> seen;
        while (out.size() < spec.count) {
          std::vector<std::size_t> idx(pairs.size());
          bool any = false;
          for (std::size_t p = 0; p < pairs.size(); ++p) {
            idx[p] = std::uniform_int_distribution<std::size_t>(0, values[p].size() - 1)(rng);
            any |= idx[p] != 0;
          }
          if (!any || !seen.insert(idx).second) continue;
          out.push_back(make(idx));
        }
      }
      break;
    }
  }
  return out;
}

struct DemandRecord {
  DemandVector demand;
  double lambda_g = 0;
  double lambda_gp = 0;
};

struct QualityReport {
  static constexpr int kSchemaVersion = 1;
  /// max over d of lambda_G(d) / lambda_G'(d); at most 1 + tol when G' dominates G.
  double lower = 1;
  /// max over d of lambda_G'(d) / lambda_G(d).
  double upper = 1;
  /// Extremes of lambda_G'(d) / lambda_G(d).
  double min_ratio = 1;
  double max_ratio = 1;
  std::vector<DemandRecord> records;
  std::string demand_set;
  double tolerance = 1e-6;
  double claimed = 1;
  bool pass = true;
  std::string disclaimer =
      "witness-set certification: the ratios hold on the listed demands only, not on every demand vector";
};

namespace detail {

inline void require_same_terminals(const TerminalNetwork& g, const TerminalNetwork& gp) {
  auto a = g.terminal_ids(), b = gp.terminal_ids();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw InputError("networks have different terminal sets");
}

inline double safe_ratio(double num, double den) {
  if (den == 0) return num == 0 ? 1.0 : kInfinity;
  return num / den;
}

}  // namespace detail

/// Compares lambda on both networks over the demand set. Verdict: lower <=
/// 1 + tol and upper <= claimed * (1 + tol).
inline QualityReport certify(const TerminalNetwork& g, const TerminalNetwork& gp, const std::vector<DemandVector>& demands,
                             double claimed, std::size_t jobs = 1, double tol = 1e-6, std::string descriptor = {}) {
  detail::require_same_terminals(g, gp);
  QualityReport rep;
  rep.claimed = claimed;
  rep.tolerance = tol;
  rep.demand_set = std::move(descriptor);
  rep.records.resize(demands.size());
  parallel_for(demands.size(), jobs, [&](std::size_t i) {
    rep.records[i].demand = demands[i];
    rep.records[i].lambda_g = lambda_value(g, demands[i]);
    rep.records[i].lambda_gp = lambda_value(gp, demands[i]);
  });
  bool first = true;
  for (const auto& r : rep.records) {
    double ratio = detail::safe_ratio(r.lambda_gp, r.lambda_g);
    double inv = detail::safe_ratio(r.lambda_g, r.lambda_gp);
    // Relative oracle noise below tol counts as equality.
    if (std::abs(r.lambda_gp - r.lambda_g) <= tol * std::max(r.lambda_g, r.lambda_gp)) ratio = inv = 1.0;
    rep.min_ratio = first ? ratio : std::min(rep.min_ratio, ratio);
    rep.max_ratio = first ? ratio : std::max(rep.max_ratio, ratio);
    rep.lower = first ? inv : std::max(rep.lower, inv);
    rep.upper = first ? ratio : std::max(rep.upper, ratio);
    first = false;
  }
  rep.pass = rep.lower <= 1 + tol && rep.upper <= claimed * (1 + tol);
  return rep;
}

struct CutReport {
  std::vector<std::vector<VertexId>> sides;  // A side per bipartition
  std::vector<Rational> cut_g;
  std::vector<Rational> cut_gp;
  Rational beta = 1;       // max cut_gp / cut_g
  Rational min_ratio = 1;  // min cut_gp / cut_g
  bool exact = true;       // every ratio equals 1
};

/// Ratios of all terminal-bipartition min cuts of gp to those of g (k <= 16).
inline CutReport certify_cuts(const TerminalNetwork& g, const TerminalNetwork& gp) {
  detail::require_same_terminals(g, gp);
  const std::size_t k = g.num_terminals();
  if (k > 16) throw BudgetExceeded("cut certification enumerates 2^(k-1) bipartitions; k = " + std::to_string(k));
  auto h = with_terminals(gp, g.terminal_ids(), {.allow_disconnected = gp.allows_disconnected()});
  auto a = all_bipartition_cuts(g);
  auto b = all_bipartition_cuts(h);
  CutReport rep;
  bool first = true;
  for (std::size_t m = 1; m < a.size(); ++m) {
    std::vector<VertexId> side;
    for (std::size_t i = 0; i + 1 < k; ++i)
      if ((m >> i) & 1U) side.push_back(g.id(g.terminals()[i]));
    rep.sides.push_back(side);
    rep.cut_g.push_back(a[m]);
    rep.cut_gp.push_back(b[m]);
    Rational r = a[m] == 0 ? (b[m] == 0 ? Rational(1) : Rational(1000000000)) : b[m] / a[m];
    if (a[m] == 0 && b[m] != 0) rep.exact = false;
    if (r != 1) rep.exact = false;
    rep.beta = first ? r : std::max(rep.beta, r);
    rep.min_ratio = first ? r : std::min(rep.min_ratio, r);
    first = false;
  }
  return rep;
}

}  // namespace flowsparse
