#pragma once

// Importance-sampling sparsifier for quasi-bipartite networks and its
// bounded-component extension, plus the Chernoff-based planner for the
// oversampling factor M.

#include "flowsparse/flow_lp.hpp"
#include "flowsparse/maxflow.hpp"
#include "flowsparse/philox.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace flowsparse {

/// 2-hop max flow of one terminal pair: F_st and its per-middle-vertex parts.
struct TwoHopFlow {
  Rational total = 0;
  std::map<Vertex, Rational> per_vertex;  // F_{st,v} > 0 only
};

/// F_st = sum_v min(c_sv, c_vt) for every terminal pair, keyed by terminal
/// vertex indices (s, t) in terminal_pairs order.
inline std::map<std::pair<Vertex, Vertex>, TwoHopFlow> two_hop_maxflows(const TerminalNetwork& net) {
  detail::require_two_hop_shape(net);
  std::map<std::pair<Vertex, Vertex>, TwoHopFlow> out;
  for (auto [s, t] : terminal_pairs(net)) {
    auto& f = out[{s, t}];
    for (const auto& m : detail::common_neighbors(net, s, t)) {
      Rational x = std::min(net.edges()[m.e_sv].cap, net.edges()[m.e_vt].cap);
      if (x <= 0) continue;
      f.per_vertex[m.v] = x;
      f.total += x;
    }
  }
  return out;
}

/// A sampled unit: one non-terminal, or one component of G \ T.
struct SamplingUnit {
  std::vector<Vertex> vertices;
  /// max over pairs with F_{st,unit} > 0 of F_{st,unit} / F_st (exact).
  Rational share = 0;
  double p = 0;        // M * share
  double p_tilde = 0;  // min(1, p)
  /// Substream of the unit: fnv1a64 of its smallest vertex id.
  std::uint64_t stream = 0;
};

struct SamplingPlan {
  double M = 0;
  std::uint64_t seed = 0;
  std::vector<SamplingUnit> units;
  /// Non-terminals (or components) on no positive 2-hop path; always removed.
  std::vector<VertexId> dropped;
  std::map<std::pair<Vertex, Vertex>, Rational> F;

  [[nodiscard]] double expected_size() const {
    double s = 0;
    for (const auto& u : units) s += u.p_tilde * static_cast<double>(u.vertices.size());
    return s;
  }
  [[nodiscard]] double sum_p() const {
    double s = 0;
    for (const auto& u : units) s += u.p;
    return s;
  }
};

namespace detail {

inline std::uint64_t unit_stream(const TerminalNetwork& net, const std::vector<Vertex>& vertices) {
  VertexId least = net.id(vertices.front());
  for (Vertex v : vertices) least = std::min(least, net.id(v));
  return fnv1a64(least);
}

inline void finish_unit(SamplingUnit& u, double M) {
  u.p = M * to_double(u.share);
  u.p_tilde = std::min(1.0, u.p);
}

// Scales every edge touching a kept unit by 1/p_tilde and removes dropped units.
inline TerminalNetwork apply_sample(const TerminalNetwork& net, const SamplingPlan& plan,
                                    const std::vector<char>& keep, std::size_t* kept_vertices) {
  std::vector<char> removed(net.num_vertices(), 0);
  std::vector<Rational> factor(net.num_vertices(), Rational(1));
  for (const auto& id : plan.dropped) removed[net.index_of(id)] = 1;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    const auto& u = plan.units[i];
    for (Vertex v : u.vertices) {
      if (!keep[i]) {
        removed[v] = 1;
      } else if (u.p_tilde < 1) {
        factor[v] = Rational(1) / from_double(u.p_tilde);
      }
    }
    if (keep[i]) kept += u.vertices.size();
  }
  if (kept_vertices) *kept_vertices = kept;
  std::vector<VertexId> ids;
  for (Vertex v = 0; v < net.num_vertices(); ++v)
    if (!removed[v]) ids.push_back(net.id(v));
  std::vector<NamedEdge> edges;
  for (const auto& e : net.edges()) {
    if (removed[e.u] || removed[e.v]) continue;
    // Within a unit both ends carry the same factor; apply it once.
    Rational f = net.is_terminal(e.u) ? factor[e.v] : factor[e.u];
    edges.push_back({net.id(e.u), net.id(e.v), e.cap * f});
  }
  return normalize(TerminalNetwork(ids, net.terminal_ids(), edges, {.allow_disconnected = true}));
}

inline std::vector<char> draw(const SamplingPlan& plan) {
  Philox4x32 rng(plan.seed);
  std::vector<char> keep(plan.units.size());
  for (std::size_t i = 0; i < plan.units.size(); ++i) {
    const auto& u = plan.units[i];
    keep[i] = u.p_tilde >= 1 || rng.uniform(u.stream) < u.p_tilde;
  }
  return keep;
}

}  // namespace detail

/// Sampling probabilities p_v = M * max_{st: F_st,v > 0} F_{st,v} / F_st.
inline SamplingPlan sampling_plan(const TerminalNetwork& net, double M, std::uint64_t seed) {
  if (!(M > 0)) throw InputError("oversampling factor M must be positive");
  auto flows = two_hop_maxflows(net);
  SamplingPlan plan;
  plan.M = M;
  plan.seed = seed;
  for (const auto& [st, f] : flows) plan.F[st] = f.total;
  for (Vertex v = 0; v < net.num_vertices(); ++v) {
    if (net.is_terminal(v)) continue;
    SamplingUnit u;
    u.vertices = {v};
    for (const auto& [st, f] : flows)
      if (auto it = f.per_vertex.find(v); it != f.per_vertex.end()) u.share = std::max<Rational>(u.share, it->second / f.total);
    if (u.share == 0) {
      plan.dropped.push_back(net.id(v));
      continue;
    }
    u.stream = detail::unit_stream(net, u.vertices);
    detail::finish_unit(u, M);
    plan.units.push_back(std::move(u));
  }
  return plan;
}

/// Sampling plan over the components of G \ T (each of at most w vertices):
/// F_{st,i} is the s-t min cut of G[V_i + {s, t}].
inline SamplingPlan grouped_sampling_plan(const TerminalNetwork& net, std::size_t w, double M, std::uint64_t seed) {
  if (!(M > 0)) throw InputError("oversampling factor M must be positive");
  if (w == 0) throw InputError("component bound w must be positive");
  auto comps = components_after_terminal_removal(net);
  for (const auto& c : comps)
    if (c.size() > w)
      throw StructureError("component of G \\ T with " + std::to_string(c.size()) + " vertices exceeds w = " +
                           std::to_string(w));
  auto pairs = terminal_pairs(net);
  std::vector<std::vector<Rational>> Fi(comps.size(), std::vector<Rational>(pairs.size(), 0));
  SamplingPlan plan;
  plan.M = M;
  plan.seed = seed;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto [s, t] = pairs[p];
      std::vector<Vertex> verts = comps[i];
      verts.push_back(s);
      verts.push_back(t);
      auto sub = induced_subnetwork(net, verts, {s, t});
      // Terminal-terminal edges are not part of the component.
      auto ids = sub.ids();
      std::vector<NamedEdge> edges;
      for (const auto& e : sub.named_edges())
        if (!((e.u == net.id(s) && e.v == net.id(t)) || (e.u == net.id(t) && e.v == net.id(s)))) edges.push_back(e);
      TerminalNetwork inner(ids, {net.id(s), net.id(t)}, edges, {.allow_disconnected = true});
      Fi[i][p] = max_flow(inner, net.id(s), net.id(t));
      plan.F[pairs[p]] += Fi[i][p];
    }
  }
  for (std::size_t i = 0; i < comps.size(); ++i) {
    SamplingUnit u;
    u.vertices = comps[i];
    for (std::size_t p = 0; p < pairs.size(); ++p)
      if (Fi[i][p] > 0) u.share = std::max<Rational>(u.share, Fi[i][p] / plan.F[pairs[p]]);
    if (u.share == 0) {
      for (Vertex v : comps[i]) plan.dropped.push_back(net.id(v));
      continue;
    }
    u.stream = detail::unit_stream(net, u.vertices);
    detail::finish_unit(u, M);
    plan.units.push_back(std::move(u));
  }
  return plan;
}

/// Draws the sample of a plan: each unit kept independently with
/// probability p_tilde, its incident capacities scaled by 1/p_tilde.
inline Sparsifier sample_from_plan(const TerminalNetwork& net, const SamplingPlan& plan) {
  auto keep = detail::draw(plan);
  std::size_t kept = 0;
  Sparsifier out{detail::apply_sample(net, plan, keep, &kept), "sample", 1.0, {}, {}};
  out.params["M"] = std::to_string(plan.M);
  out.params["seed"] = std::to_string(plan.seed);
  out.params["kept_non_terminals"] = std::to_string(kept);
  out.params["dropped_non_terminals"] = std::to_string(plan.dropped.size());
  return out;
}

inline Sparsifier sample_sparsifier(const TerminalNetwork& net, double M, std::uint64_t seed) {
  return sample_from_plan(net, sampling_plan(net, M, seed));
}

inline Sparsifier grouped_sample_sparsifier(const TerminalNetwork& net, std::size_t w, double M, std::uint64_t seed) {
  auto out = sample_from_plan(net, grouped_sampling_plan(net, w, M, seed));
  out.method = "sample-grouped";
  out.params["w"] = std::to_string(w);
  out.notes.push_back(
      "interpretation: edges inside a kept component are scaled by the same 1/p_tilde as its terminal edges");
  return out;
}

enum class Tail { Lower, Upper };

/// exp(-eps^2 mean / (2b)) for the lower tail, exp(-eps^2 mean / (3b)) for the upper tail.
inline double chernoff_bound(double eps, double mean, double b, Tail tail) {
  if (!(eps > 0 && eps < 1) || !(mean > 0) || !(b > 0)) throw InputError("chernoff bound needs 0<eps<1, mean>0, b>0");
  return std::exp(-eps * eps * mean / ((tail == Tail::Lower ? 2.0 : 3.0) * b));
}

struct PlannerResult {
  double eps = 0;
  std::size_t k = 0;
  double fail = 0;
  double eta = 0;
  /// Union-bound count |D_LB| * C(k,2), as its natural logarithm.
  double log_union = 0;
  double M = 0;
  /// Failure bound at the chosen M: |D_LB| C(k,2) exp(-eps^2 eta M / 2).
  double predicted_failure = 0;
  /// eps^-3 k^5 log(eps^-1 log k), the asymptotic M with the constant set to 1.
  double asymptotic_M = 0;
};

/// Smallest M whose union bound over the discretized lower-bound demand set
/// stays below `fail`, with eta = eps / k^2 and
/// |D_LB| = (2 + log_{1+eps}(1/eta))^C(k,2).
inline PlannerResult plan_oversampling(double eps, std::size_t k, double fail) {
  if (!(eps > 0 && eps < 1)) throw InputError("planner needs 0 < eps < 1");
  if (k < 2) throw InputError("planner needs k >= 2");
  if (!(fail > 0 && fail < 1)) throw InputError("planner needs 0 < fail < 1");
  PlannerResult r;
  r.eps = eps;
  r.k = k;
  r.fail = fail;
  r.eta = eps / static_cast<double>(k * k);
  const double pairs = static_cast<double>(k * (k - 1) / 2);
  const double grid = 2 + std::log(1 / r.eta) / std::log1p(eps);
  r.log_union = pairs * std::log(grid) + std::log(pairs);
  r.M = 2 * (r.log_union - std::log(fail)) / (eps * eps * r.eta);
  r.predicted_failure = std::exp(r.log_union) * chernoff_bound(eps, r.eta * r.M, 1.0, Tail::Lower);
  const double lk = std::log(static_cast<double>(k));
  r.asymptotic_M = std::pow(eps, -3) * std::pow(static_cast<double>(k), 5) * std::log(std::max(lk / eps, 1.0 + 1e-12));
  return r;
}

}  // namespace flowsparse
