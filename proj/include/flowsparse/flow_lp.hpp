#pragma once

// Concurrent multicommodity flow: lambda_G(d), its dual, the 2-hop and
// terminal-free restrictions, and the sparsest cut.
//
// lambda is solved in path form by column generation:
//
//   max lambda  s.t.  lambda*d_j - sum_{P in paths(j)} f_P <= 0   per commodity j
//                     sum_{P containing e} f_P <= c_e            per edge e
//
// Pricing is a shortest path under the edge-row duals. Edge rows are created
// the first time a generated path uses the edge; rowless edges have dual 0.

#include "flowsparse/graph_core.hpp"
#include "flowsparse/lp/dense_simplex.hpp"
#include "flowsparse/lp/revised_simplex.hpp"
#include "flowsparse/maxflow.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <tuple>
#include <vector>

namespace flowsparse {

struct Commodity {
  Vertex s = 0;
  Vertex t = 0;
  double demand = 0;
};

struct PathFlow {
  std::size_t commodity = 0;
  std::vector<Vertex> vertices;
  double amount = 0;
};

struct FlowSolution {
  double lambda = 0;
  std::vector<Commodity> commodities;
  /// Path form (lambda, lambda_terminal_free).
  std::vector<PathFlow> paths;
  /// edge_flow[j][e]: signed flow of commodity j on edge e, positive in the
  /// direction edges()[e].u -> edges()[e].v.
  std::vector<std::vector<double>> edge_flow;
  /// middle_flow[j][v]: flow of commodity j along s-v-t (2-hop form only).
  std::vector<std::vector<double>> middle_flow;
};

struct DualSolution {
  /// Length per edge, indexed like net.edges().
  std::vector<double> lengths;
  /// Distance per terminal pair, in terminal_pairs(net) order.
  std::vector<double> distances;
  double objective = 0;
};

struct LambdaResult {
  double value = 0;
  FlowSolution primal;
  DualSolution dual;
  /// A commodity with positive demand has no admissible path (value 0).
  bool unroutable = false;
  std::size_t rounds = 0;
};

struct LambdaOptions {
  Tolerances tol{};
  /// Paths may not pass through a terminal other than their endpoints.
  bool terminal_free = false;
  std::size_t max_rounds = 100000;
};

namespace detail {

inline std::vector<Commodity> commodities_of(const TerminalNetwork& net, const DemandVector& d) {
  if (d.is_zero()) throw InputError("lambda is undefined for the zero demand");
  d.validate(net);
  std::vector<Commodity> out;
  for (const auto& [key, value] : d.entries()) out.push_back({net.index_of(key.first), net.index_of(key.second), value});
  return out;
}

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<std::size_t> hops;
  std::vector<std::size_t> via_edge;  // npos at the source / unreached
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Dijkstra from s under `length`, ties broken by hop count. With
// terminal_free set, terminals other than s are reached but never expanded.
inline ShortestPaths dijkstra(const TerminalNetwork& net, Vertex s, const std::vector<double>& length,
                              bool terminal_free) {
  const std::size_t n = net.num_vertices();
  ShortestPaths sp{std::vector<double>(n, kInfinity), std::vector<std::size_t>(n, kNone),
                   std::vector<std::size_t>(n, kNone)};
  using Item = std::tuple<double, std::size_t, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  sp.dist[s] = 0;
  sp.hops[s] = 0;
  pq.emplace(0.0, 0, s);
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    auto [dx, hx, x] = pq.top();
    pq.pop();
    if (done[x]) continue;
    done[x] = 1;
    if (terminal_free && x != s && net.is_terminal(x)) continue;
    for (const auto& [y, e] : net.adjacency()[x]) {
      double nd = dx + length[e];
      std::size_t nh = hx + 1;
      if (nd < sp.dist[y] || (nd == sp.dist[y] && nh < sp.hops[y])) {
        sp.dist[y] = nd;
        sp.hops[y] = nh;
        sp.via_edge[y] = e;
        pq.emplace(nd, nh, y);
      }
    }
  }
  return sp;
}

inline std::vector<std::size_t> trace_edges(const TerminalNetwork& net, const ShortestPaths& sp, Vertex s, Vertex t,
                                            std::vector<Vertex>* vertices) {
  std::vector<std::size_t> edges;
  std::vector<Vertex> verts{t};
  for (Vertex x = t; x != s;) {
    std::size_t e = sp.via_edge[x];
    edges.push_back(e);
    const auto& edge = net.edges()[e];
    x = edge.u == x ? edge.v : edge.u;
    verts.push_back(x);
  }
  std::reverse(edges.begin(), edges.end());
  std::reverse(verts.begin(), verts.end());
  if (vertices) *vertices = std::move(verts);
  return edges;
}

}  // namespace detail

/// Max concurrent flow lambda_G(d) with a primal path solution and the
/// canonical dual (pair distances = shortest paths under the edge lengths,
/// lengths scaled so that sum_st d_st * delta_st = 1).
inline LambdaResult lambda(const TerminalNetwork& net, const DemandVector& d, const LambdaOptions& opt = {}) {
  using detail::kNone;
  LambdaResult res;
  auto comm = detail::commodities_of(net, d);
  const std::size_t J = comm.size();
  const std::size_t m = net.num_edges();
  const auto caps = net.capacities();
  res.primal.commodities = comm;

  lp::RevisedSimplex lp;
  for (std::size_t j = 0; j < J; ++j) lp.add_row(0.0);
  lp::SparseColumn lambda_col;
  for (std::size_t j = 0; j < J; ++j) lambda_col.emplace_back(j, comm[j].demand);
  lp.add_column(1.0, lambda_col);

  std::vector<std::size_t> edge_row(m, kNone);
  struct Column {
    std::size_t commodity;
    std::vector<Vertex> vertices;
    std::vector<std::size_t> edges;
  };
  std::vector<Column> columns;  // column c+1 in the LP

  auto add_path = [&](std::size_t j, std::vector<Vertex> verts, std::vector<std::size_t> edges) {
    lp::SparseColumn col{{j, -1.0}};
    for (std::size_t e : edges) {
      if (edge_row[e] == kNone) edge_row[e] = lp.add_row(caps[e]);
      col.emplace_back(edge_row[e], 1.0);
    }
    lp.add_column(0.0, std::move(col));
    columns.push_back({j, std::move(verts), std::move(edges)});
  };

  // Initial columns: a fewest-hop path per commodity.
  std::vector<double> length(m, 0.0);
  {
    std::map<Vertex, detail::ShortestPaths> by_source;
    for (std::size_t j = 0; j < J; ++j) {
      auto it = by_source.find(comm[j].s);
      if (it == by_source.end())
        it = by_source.emplace(comm[j].s, detail::dijkstra(net, comm[j].s, length, opt.terminal_free)).first;
      if (it->second.dist[comm[j].t] == kInfinity) {
        res.unroutable = true;
        res.value = 0;
        res.dual.lengths.assign(m, 0.0);
        res.dual.distances.assign(terminal_pairs(net).size(), kInfinity);
        res.primal.edge_flow.assign(J, std::vector<double>(m, 0.0));
        return res;
      }
      std::vector<Vertex> verts;
      auto edges = detail::trace_edges(net, it->second, comm[j].s, comm[j].t, &verts);
      add_path(j, std::move(verts), std::move(edges));
    }
  }

  std::vector<double> y;
  for (;;) {
    if (++res.rounds > opt.max_rounds) throw InternalError("column generation did not converge");
    auto status = lp.solve();
    if (status != lp::LpStatus::Optimal)
      throw InternalError(std::string("concurrent flow master LP: ") + lp::to_string(status));
    y = lp.duals();
    for (std::size_t e = 0; e < m; ++e) length[e] = edge_row[e] == kNone ? 0.0 : std::max(0.0, y[edge_row[e]]);
    std::map<Vertex, detail::ShortestPaths> by_source;
    bool added = false;
    for (std::size_t j = 0; j < J; ++j) {
      auto it = by_source.find(comm[j].s);
      if (it == by_source.end())
        it = by_source.emplace(comm[j].s, detail::dijkstra(net, comm[j].s, length, opt.terminal_free)).first;
      const double yj = std::max(0.0, y[j]);
      if (it->second.dist[comm[j].t] < yj - opt.tol.feasibility * (1.0 + yj)) {
        std::vector<Vertex> verts;
        auto edges = detail::trace_edges(net, it->second, comm[j].s, comm[j].t, &verts);
        add_path(j, std::move(verts), std::move(edges));
        added = true;
      }
    }
    if (!added) break;
  }

  const double lam = std::max(0.0, lp.objective());
  res.value = lam;
  res.primal.lambda = lam;

  // Primal: trim each commodity to exactly lambda*d_j.
  auto x = lp.primal();
  std::vector<double> routed(J, 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) routed[columns[c].commodity] += x[c + 1];
  res.primal.edge_flow.assign(J, std::vector<double>(m, 0.0));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    double amount = x[c + 1];
    if (amount <= 0) continue;
    const auto j = columns[c].commodity;
    if (routed[j] > 0) amount *= std::min(1.0, lam * comm[j].demand / routed[j]);
    if (amount <= 0) continue;
    res.primal.paths.push_back({j, columns[c].vertices, amount});
    const auto& verts = columns[c].vertices;
    for (std::size_t i = 0; i < columns[c].edges.size(); ++i) {
      std::size_t e = columns[c].edges[i];
      double sign = net.edges()[e].u == verts[i] ? 1.0 : -1.0;
      res.primal.edge_flow[j][e] += sign * amount;
    }
  }

  // Canonical dual.
  auto pairs = terminal_pairs(net);
  std::vector<double> dist(pairs.size(), 0.0);
  std::map<Vertex, detail::ShortestPaths> by_source;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto it = by_source.find(pairs[p].first);
    if (it == by_source.end())
      it = by_source.emplace(pairs[p].first, detail::dijkstra(net, pairs[p].first, length, opt.terminal_free)).first;
    dist[p] = it->second.dist[pairs[p].second];
  }
  double weighted = 0;
  for (const auto& c : comm) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if ((pairs[p].first == c.s && pairs[p].second == c.t) || (pairs[p].first == c.t && pairs[p].second == c.s))
        weighted += c.demand * dist[p];
    }
  }
  double scale = weighted > 0 ? 1.0 / weighted : 0.0;
  res.dual.lengths.resize(m);
  res.dual.objective = 0;
  for (std::size_t e = 0; e < m; ++e) {
    res.dual.lengths[e] = length[e] * scale;
    res.dual.objective += caps[e] * res.dual.lengths[e];
  }
  res.dual.distances.resize(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) res.dual.distances[p] = dist[p] * scale;
  return res;
}

inline double lambda_value(const TerminalNetwork& net, const DemandVector& d, const LambdaOptions& opt = {}) {
  return lambda(net, d, opt).value;
}

/// Max concurrent flow restricted to paths with no terminal as an internal vertex.
inline LambdaResult lambda_terminal_free(const TerminalNetwork& net, const DemandVector& d, LambdaOptions opt = {}) {
  opt.terminal_free = true;
  return lambda(net, d, opt);
}

// ---------------------------------------------------------------------------
// 2-hop LP and its dual (quasi-bipartite networks with independent terminals)

namespace detail {

inline void require_two_hop_shape(const TerminalNetwork& net) {
  if (!is_quasi_bipartite(net)) throw StructureError("network is not quasi-bipartite");
  for (const auto& e : net.edges())
    if (net.is_terminal(e.u) && net.is_terminal(e.v))
      throw StructureError("terminals must form an independent set (subdivide terminal-terminal edges first)");
}

// Common non-terminal neighbors of s and t with the edge indices (s,v), (v,t).
struct Middle {
  Vertex v;
  std::size_t e_sv;
  std::size_t e_vt;
};

inline std::vector<Middle> common_neighbors(const TerminalNetwork& net, Vertex s, Vertex t) {
  std::map<Vertex, std::size_t> at_s;
  for (const auto& [v, e] : net.adjacency()[s])
    if (!net.is_terminal(v)) at_s.emplace(v, e);
  std::vector<Middle> out;
  for (const auto& [v, e] : net.adjacency()[t])
    if (auto it = at_s.find(v); it != at_s.end()) out.push_back({v, it->second, e});
  std::sort(out.begin(), out.end(), [](const Middle& a, const Middle& b) { return a.v < b.v; });
  return out;
}

}  // namespace detail

struct TwoHopResult {
  double value = 0;
  FlowSolution primal;
  /// Some commodity with positive demand has no common neighbor.
  bool infeasible_commodity = false;
};

/// Concurrent flow along 2-hop paths s-v-t only.
inline TwoHopResult lambda_2hop(const TerminalNetwork& net, const DemandVector& d, const Tolerances& = {}) {
  detail::require_two_hop_shape(net);
  TwoHopResult res;
  auto comm = detail::commodities_of(net, d);
  const std::size_t J = comm.size();
  res.primal.commodities = comm;
  res.primal.middle_flow.assign(J, std::vector<double>(net.num_vertices(), 0.0));
  res.primal.edge_flow.assign(J, std::vector<double>(net.num_edges(), 0.0));
  std::vector<std::vector<detail::Middle>> mids(J);
  for (std::size_t j = 0; j < J; ++j) {
    mids[j] = detail::common_neighbors(net, comm[j].s, comm[j].t);
    if (mids[j].empty()) res.infeasible_commodity = true;
  }
  if (res.infeasible_commodity) return res;

  lp::RevisedSimplex lp;
  for (std::size_t j = 0; j < J; ++j) lp.add_row(0.0);
  const auto caps = net.capacities();
  std::vector<std::size_t> edge_row(net.num_edges());
  for (std::size_t e = 0; e < net.num_edges(); ++e) edge_row[e] = lp.add_row(caps[e]);
  lp::SparseColumn lambda_col;
  for (std::size_t j = 0; j < J; ++j) lambda_col.emplace_back(j, comm[j].demand);
  lp.add_column(1.0, lambda_col);
  for (std::size_t j = 0; j < J; ++j)
    for (const auto& mid : mids[j])
      lp.add_column(0.0, {{j, -1.0}, {edge_row[mid.e_sv], 1.0}, {edge_row[mid.e_vt], 1.0}});
  auto status = lp.solve();
  if (status != lp::LpStatus::Optimal) throw InternalError(std::string("2-hop LP: ") + lp::to_string(status));
  res.value = std::max(0.0, lp.objective());
  res.primal.lambda = res.value;
  auto x = lp.primal();
  std::size_t c = 1;
  for (std::size_t j = 0; j < J; ++j) {
    double routed = 0;
    for (std::size_t i = 0; i < mids[j].size(); ++i) routed += x[c + i];
    double trim = routed > 0 ? std::min(1.0, res.value * comm[j].demand / routed) : 0.0;
    for (const auto& mid : mids[j]) {
      double f = x[c++] * trim;
      res.primal.middle_flow[j][mid.v] = f;
      const auto& es = net.edges()[mid.e_sv];
      const auto& et = net.edges()[mid.e_vt];
      res.primal.edge_flow[j][mid.e_sv] += es.u == comm[j].s ? f : -f;
      res.primal.edge_flow[j][mid.e_vt] += et.u == mid.v ? f : -f;
    }
  }
  return res;
}

struct TwoHopDual {
  double value = 0;
  DualSolution dual;  // distances hold y_st in terminal_pairs order
};

/// The dual of the 2-hop LP, built and solved directly:
///   min sum c_e l_e  s.t.  sum d_st y_st >= 1,  y_st <= l_sv + l_vt.
inline TwoHopDual dual_2hop(const TerminalNetwork& net, const DemandVector& d) {
  detail::require_two_hop_shape(net);
  auto comm = detail::commodities_of(net, d);
  auto pairs = terminal_pairs(net);
  const std::size_t m = net.num_edges();
  const std::size_t P = pairs.size();
  std::map<std::pair<Vertex, Vertex>, double> demand;
  for (const auto& c : comm) {
    demand[std::minmax(c.s, c.t)] = c.demand;
    if (detail::common_neighbors(net, c.s, c.t).empty())
      throw InputError("dual_2hop: commodity " + net.id(c.s) + "-" + net.id(c.t) + " has no common neighbor");
  }
  // Variables: l_e (m), y_p (P).
  lp::DenseLp<double> lp(m + P);
  const auto caps = net.capacities();
  for (std::size_t e = 0; e < m; ++e) lp.objective[e] = -caps[e];
  auto& norm = lp.add_row(lp::RowSense::GreaterEqual, 1.0);
  for (std::size_t p = 0; p < P; ++p) {
    auto it = demand.find(std::minmax(pairs[p].first, pairs[p].second));
    if (it != demand.end()) norm.coeffs[m + p] = it->second;
  }
  for (std::size_t p = 0; p < P; ++p) {
    auto mids = detail::common_neighbors(net, pairs[p].first, pairs[p].second);
    if (mids.empty() && !demand.count(std::minmax(pairs[p].first, pairs[p].second))) {
      // y_p would be unbounded but useless; pin it to zero.
      auto& row = lp.add_row(lp::RowSense::LessEqual, 0.0);
      row.coeffs[m + p] = 1.0;
      continue;
    }
    for (const auto& mid : mids) {
      auto& row = lp.add_row(lp::RowSense::LessEqual, 0.0);
      row.coeffs[m + p] = 1.0;
      row.coeffs[mid.e_sv] -= 1.0;
      row.coeffs[mid.e_vt] -= 1.0;
    }
  }
  auto r = lp::solve_dense(lp, 1e-11);
  if (r.status != lp::LpStatus::Optimal) throw InternalError(std::string("2-hop dual LP: ") + lp::to_string(r.status));
  TwoHopDual out;
  out.value = -r.objective;
  out.dual.objective = out.value;
  out.dual.lengths.assign(r.x.begin(), r.x.begin() + static_cast<long>(m));
  out.dual.distances.assign(r.x.begin() + static_cast<long>(m), r.x.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sparsest cut

struct Cut {
  std::vector<Vertex> side;
  Rational capacity;
  double separated_demand = 0;
  double sparsity = kInfinity;
};

namespace detail {

inline Cut make_cut(const TerminalNetwork& net, const DemandVector& d, const std::vector<char>& in) {
  Cut cut;
  for (Vertex v = 0; v < net.num_vertices(); ++v)
    if (in[v]) cut.side.push_back(v);
  cut.capacity = 0;
  for (const auto& e : net.edges())
    if (in[e.u] != in[e.v]) cut.capacity += e.cap;
  for (const auto& [key, value] : d.entries())
    if (in[net.index_of(key.first)] != in[net.index_of(key.second)]) cut.separated_demand += value;
  cut.sparsity = cut.separated_demand > 0 ? to_double(cut.capacity) / cut.separated_demand : kInfinity;
  return cut;
}

}  // namespace detail

/// Exact sparsest cut by enumerating all vertex subsets (Gray code order).
inline Cut sparsest_cut(const TerminalNetwork& net, const DemandVector& d, std::size_t max_vertices = 20) {
  auto comm = detail::commodities_of(net, d);
  const std::size_t n = net.num_vertices();
  if (n > max_vertices)
    throw BudgetExceeded("sparsest_cut brute force over " + std::to_string(n) + " vertices exceeds the bound of " +
                         std::to_string(max_vertices) + "; use sparsest_cut_terminal_bipartitions");
  if (n < 2) throw InputError("sparsest_cut needs at least two vertices");
  const auto caps = net.capacities();
  std::vector<char> in(n, 0);
  double cap = 0;
  double best = kInfinity;
  std::vector<char> best_in;
  // Vertex n-1 stays outside: S and V\S give the same cut.
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < total; ++i) {
    auto v = static_cast<Vertex>(std::countr_zero(i));
    for (const auto& [w, e] : net.adjacency()[v]) cap += (in[w] == in[v]) ? caps[e] : -caps[e];
    in[v] ^= 1;
    double sep = 0;
    for (const auto& c : comm)
      if (in[c.s] != in[c.t]) sep += c.demand;
    if (sep <= 0) continue;
    double ratio = cap / sep;
    if (ratio < best) {
      best = ratio;
      best_in = in;
    }
  }
  if (best_in.empty()) throw InternalError("no cut separates the demand");
  return detail::make_cut(net, d, best_in);
}

/// Sparsest cut restricted to terminal bipartitions, each completed by a
/// minimum cut. For a fixed terminal bipartition the separated demand is
/// fixed, so the minimum over all 2^(k-1)-1 bipartitions equals the exact
/// sparsest cut; cost is one max-flow per bipartition.
inline Cut sparsest_cut_terminal_bipartitions(const TerminalNetwork& net, const DemandVector& d) {
  auto comm = detail::commodities_of(net, d);
  const std::size_t k = net.num_terminals();
  if (k > 20) throw BudgetExceeded("terminal bipartition enumeration over " + std::to_string(k) + " terminals");
  Cut best;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (k - 1)); ++mask) {
    double sep = 0;
    for (const auto& c : comm)
      if (((mask >> net.terminal_position(c.s)) & 1U) != ((mask >> net.terminal_position(c.t)) & 1U))
        sep += c.demand;
    if (sep <= 0) continue;
    std::vector<Vertex> a, b;
    for (std::size_t i = 0; i < k; ++i) ((mask >> i) & 1U ? a : b).push_back(net.terminals()[i]);
    auto [value, side] = min_cut_between(net, a, b);
    double ratio = to_double(value) / sep;
    if (ratio < best.sparsity) best = detail::make_cut(net, d, side);
  }
  return best;
}

}  // namespace flowsparse
