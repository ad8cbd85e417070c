#pragma once

// Test-only helpers: random instances and independent oracles. The oracles
// here share no code with the library solvers they check (edge-flow LP via
// the dense tableau instead of path column generation; cut enumeration by
// brute force instead of max-flow).

#include "flowsparse/flow_lp.hpp"
#include "flowsparse/graph_core.hpp"
#include "flowsparse/lp/dense_simplex.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fs_test {

using namespace flowsparse;

inline std::string vname(std::size_t i) { return "v" + std::to_string(i); }
inline std::string tname(std::size_t i) { return "t" + std::to_string(i); }

/// Connected random net: n vertices (first k are terminals t0..), random
/// spanning tree plus `extra` random edges, integer capacities in [1, maxcap].
inline TerminalNetwork random_net(std::mt19937_64& rng, std::size_t n, std::size_t k, std::size_t extra,
                                  int maxcap = 10) {
  std::vector<VertexId> ids;
  std::vector<VertexId> terms;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(i < k ? tname(i) : vname(i));
    if (i < k) terms.push_back(ids.back());
  }
  std::uniform_int_distribution<int> cap(1, maxcap);
  std::vector<NamedEdge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    edges.push_back({ids[i], ids[parent(rng)], Rational(cap(rng))});
  }
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  for (std::size_t i = 0; i < extra; ++i) {
    auto a = any(rng), b = any(rng);
    if (a != b) edges.push_back({ids[a], ids[b], Rational(cap(rng))});
  }
  return TerminalNetwork(ids, terms, edges);
}

/// Quasi-bipartite net with independent terminals: every non-terminal joins
/// 2..min(k,4) random terminals.
inline TerminalNetwork random_quasi_bipartite(std::mt19937_64& rng, std::size_t k, std::size_t n_mid, int maxcap = 10) {
  for (;;) {
    std::vector<VertexId> ids, terms;
    for (std::size_t i = 0; i < k; ++i) {
      ids.push_back(tname(i));
      terms.push_back(ids.back());
    }
    std::uniform_int_distribution<int> cap(1, maxcap);
    std::vector<NamedEdge> edges;
    for (std::size_t v = 0; v < n_mid; ++v) {
      ids.push_back(vname(v));
      std::vector<std::size_t> perm(k);
      for (std::size_t i = 0; i < k; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::uniform_int_distribution<std::size_t> deg(2, std::min<std::size_t>(k, 4));
      std::size_t dv = deg(rng);
      for (std::size_t i = 0; i < dv; ++i) edges.push_back({ids.back(), terms[perm[i]], Rational(cap(rng))});
    }
    try {
      return TerminalNetwork(ids, terms, edges);
    } catch (const InputError&) {
    }
  }
}

/// Random demand with iid coordinates in (0,1], each pair present with probability `density`.
inline DemandVector random_demand(std::mt19937_64& rng, const TerminalNetwork& net, double density = 1.0) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution keep(density);
  DemandVector d;
  const auto& T = net.terminals();
  for (;;) {
    for (std::size_t i = 0; i < T.size(); ++i)
      for (std::size_t j = i + 1; j < T.size(); ++j)
        if (keep(rng)) d.set(net.id(T[i]), net.id(T[j]), u(rng));
    if (!d.is_zero()) return d;
  }
}

/// lambda_G(d) from the edge-flow LP: two arcs per edge sharing the capacity,
/// flow conservation per commodity. Solved by the dense tableau simplex.
inline double edge_lp_lambda(const TerminalNetwork& net, const DemandVector& d) {
  struct C {
    Vertex s, t;
    double dem;
  };
  std::vector<C> comm;
  for (const auto& [key, v] : d.entries()) comm.push_back({net.index_of(key.first), net.index_of(key.second), v});
  const std::size_t m = net.num_edges(), n = net.num_vertices(), J = comm.size();
  const std::size_t nv = 1 + 2 * m * J;
  auto arc = [&](std::size_t j, std::size_t e, int dir) { return 1 + (j * m + e) * 2 + static_cast<std::size_t>(dir); };
  lp::DenseLp<double> lp(nv);
  lp.objective[0] = 1;
  for (std::size_t j = 0; j < J; ++j) {
    for (Vertex x = 0; x + 1 < n; ++x) {
      auto& row = lp.add_row(lp::RowSense::Equal, 0.0);
      if (x == comm[j].s) row.coeffs[0] = -comm[j].dem;
      if (x == comm[j].t) row.coeffs[0] = comm[j].dem;
      for (std::size_t e = 0; e < m; ++e) {
        const auto& ed = net.edges()[e];
        // dir 0: u->v, dir 1: v->u ; outflow positive
        if (ed.u == x) {
          row.coeffs[arc(j, e, 0)] += 1;
          row.coeffs[arc(j, e, 1)] -= 1;
        }
        if (ed.v == x) {
          row.coeffs[arc(j, e, 1)] += 1;
          row.coeffs[arc(j, e, 0)] -= 1;
        }
      }
    }
  }
  for (std::size_t e = 0; e < m; ++e) {
    auto& row = lp.add_row(lp::RowSense::LessEqual, to_double(net.edges()[e].cap));
    for (std::size_t j = 0; j < J; ++j) {
      row.coeffs[arc(j, e, 0)] = 1;
      row.coeffs[arc(j, e, 1)] = 1;
    }
  }
  auto r = lp::solve_dense(lp, 1e-10);
  if (r.status != lp::LpStatus::Optimal) throw std::runtime_error("edge LP oracle failed");
  return r.objective;
}

/// Brute-force terminal bipartition min cut: minimum over all vertex subsets
/// containing A and avoiding B. Exact rational.
inline Rational brute_mincut(const TerminalNetwork& net, std::uint64_t terminal_mask) {
  const std::size_t n = net.num_vertices();
  std::vector<Vertex> free;
  std::vector<char> in(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (net.is_terminal(v))
      in[v] = (terminal_mask >> net.terminal_position(v)) & 1U;
    else
      free.push_back(v);
  }
  Rational best = -1;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << free.size()); ++s) {
    for (std::size_t i = 0; i < free.size(); ++i) in[free[i]] = (s >> i) & 1U;
    Rational c = 0;
    for (const auto& e : net.edges())
      if (in[e.u] != in[e.v]) c += e.cap;
    if (best < 0 || c < best) best = c;
  }
  return best;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace fs_test

namespace fs_test {

/// Checks a signed edge-flow solution: conservation per commodity, net
/// outflow lambda * d_j at the source, and joint capacity. Returns the first
/// violation or an empty string.
inline std::string flow_violation(const TerminalNetwork& net, const FlowSolution& sol, double tol = 1e-7) {
  const std::size_t m = net.num_edges();
  std::vector<double> load(m, 0.0);
  for (std::size_t j = 0; j < sol.commodities.size(); ++j) {
    std::vector<double> out(net.num_vertices(), 0.0);
    for (std::size_t e = 0; e < m; ++e) {
      load[e] += std::abs(sol.edge_flow[j][e]);
      out[net.edges()[e].u] += sol.edge_flow[j][e];
      out[net.edges()[e].v] -= sol.edge_flow[j][e];
    }
    const auto& c = sol.commodities[j];
    const double want = sol.lambda * c.demand;
    for (Vertex v = 0; v < net.num_vertices(); ++v) {
      double expect = v == c.s ? want : v == c.t ? -want : 0.0;
      if (std::abs(out[v] - expect) > tol * std::max(1.0, want))
        return "conservation at " + net.id(v) + " for commodity " + std::to_string(j);
    }
  }
  for (std::size_t e = 0; e < m; ++e)
    if (load[e] > to_double(net.edges()[e].cap) * (1 + tol) + tol) return "capacity of edge " + std::to_string(e);
  return {};
}

}  // namespace fs_test

namespace fs_test {

/// Terminal bipartition min cut by breadth-first augmenting paths on an
/// adjacency matrix with a super source and sink. Exact rational; independent
/// of the library's max-flow code.
inline Rational augmenting_mincut(const TerminalNetwork& net, std::uint64_t terminal_mask) {
  const std::size_t n = net.num_vertices() + 2;
  const std::size_t src = n - 2, snk = n - 1;
  std::vector<std::vector<Rational>> res(n, std::vector<Rational>(n, Rational(0)));
  Rational total = 0;
  for (const auto& e : net.edges()) {
    res[e.u][e.v] += e.cap;
    res[e.v][e.u] += e.cap;
    total += e.cap;
  }
  const Rational big = total + 1;
  for (Vertex t : net.terminals()) {
    if ((terminal_mask >> net.terminal_position(t)) & 1U)
      res[src][t] = big;
    else
      res[t][snk] = big;
  }
  Rational flow = 0;
  for (;;) {
    std::vector<std::size_t> parent(n, n);
    parent[src] = src;
    std::vector<std::size_t> queue{src};
    for (std::size_t head = 0; head < queue.size() && parent[snk] == n; ++head) {
      std::size_t x = queue[head];
      for (std::size_t y = 0; y < n; ++y) {
        if (parent[y] == n && res[x][y] > 0) {
          parent[y] = x;
          queue.push_back(y);
        }
      }
    }
    if (parent[snk] == n) return flow;
    Rational push = -1;
    for (std::size_t y = snk; y != src; y = parent[y])
      if (push < 0 || res[parent[y]][y] < push) push = res[parent[y]][y];
    for (std::size_t y = snk; y != src; y = parent[y]) {
      res[parent[y]][y] -= push;
      res[y][parent[y]] += push;
    }
    flow += push;
  }
}

}  // namespace fs_test
