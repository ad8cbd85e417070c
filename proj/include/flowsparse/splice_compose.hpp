#pragma once

// Flow-path surgery (splitting paths at internal terminals and joining them
// back) and gluing of sparsifiers along shared terminals.

#include "flowsparse/flow_lp.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

namespace flowsparse {

struct DecomposedPath {
  std::size_t id = 0;
  std::vector<VertexId> vertices;  // terminal to terminal
  Rational amount = 0;
};

struct FlowDecomposition {
  std::set<VertexId> terminals;
  std::vector<DecomposedPath> paths;
  std::size_t next_id = 0;

  /// Demand induced by the paths: d_st = total amount of st-paths.
  [[nodiscard]] std::map<TerminalPair, Rational> demand_exact() const {
    std::map<TerminalPair, Rational> out;
    for (const auto& p : paths) out[make_pair_key(p.vertices.front(), p.vertices.back())] += p.amount;
    return out;
  }

  [[nodiscard]] DemandVector demand() const {
    DemandVector d;
    for (const auto& [key, v] : demand_exact()) d.set(key.first, key.second, to_double(v));
    return d;
  }

  /// Number of internal vertices of all paths that are terminals.
  [[nodiscard]] std::size_t internal_terminal_count() const {
    std::size_t c = 0;
    for (const auto& p : paths)
      for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) c += terminals.count(p.vertices[i]);
    return c;
  }
};

/// Total amount crossing each undirected vertex pair, keyed (min id, max id).
inline std::map<TerminalPair, Rational> edge_loads(const FlowDecomposition& dec) {
  std::map<TerminalPair, Rational> load;
  for (const auto& p : dec.paths)
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) load[make_pair_key(p.vertices[i], p.vertices[i + 1])] += p.amount;
  return load;
}

/// Checks that every path is a walk in net between terminals and that loads fit the capacities.
inline void check_decomposition(const TerminalNetwork& net, const FlowDecomposition& dec, double tol = 1e-9) {
  for (const auto& p : dec.paths) {
    if (p.vertices.size() < 2) throw InputError("decomposed path has fewer than two vertices");
    if (!dec.terminals.count(p.vertices.front()) || !dec.terminals.count(p.vertices.back()))
      throw InputError("decomposed path does not join two terminals");
    if (p.amount <= 0) throw InputError("decomposed path with nonpositive amount");
  }
  for (const auto& [key, load] : edge_loads(dec)) {
    auto u = net.find(key.first), v = net.find(key.second);
    if (!u || !v) throw InputError("decomposed path uses an unknown vertex");
    Rational cap = net.capacity_between(*u, *v);
    if (cap == 0) throw InputError("decomposed path uses a missing edge " + key.first + "-" + key.second);
    if (to_double(load) > to_double(cap) * (1 + tol) + tol) throw InputError("decomposition overloads edge " + key.first + "-" + key.second);
  }
}

/// Path decomposition of a (signed edge-flow) solution. Flow cycles are
/// cancelled; amounts below a relative 1e-12 are treated as zero. Each
/// commodity yields at most |E| paths.
inline FlowDecomposition decompose_flow(const TerminalNetwork& net, const FlowSolution& sol, double tol = 1e-6) {
  const std::size_t m = net.num_edges(), n = net.num_vertices();
  if (sol.edge_flow.size() != sol.commodities.size()) throw InputError("flow solution without edge flows");
  const auto caps = net.capacities();
  std::vector<double> total(m, 0.0);
  double scale = 0;
  for (const auto& f : sol.edge_flow) {
    if (f.size() != m) throw InputError("flow solution does not match the network");
    for (std::size_t e = 0; e < m; ++e) {
      total[e] += std::abs(f[e]);
      scale = std::max(scale, std::abs(f[e]));
    }
  }
  for (std::size_t e = 0; e < m; ++e)
    if (total[e] > caps[e] * (1 + tol) + tol) throw InputError("infeasible flow: edge " + std::to_string(e) + " over capacity");
  const double zero = 1e-12 * std::max(1.0, scale);

  FlowDecomposition dec;
  for (Vertex t : net.terminals()) dec.terminals.insert(net.id(t));
  for (std::size_t j = 0; j < sol.commodities.size(); ++j) {
    const auto& c = sol.commodities[j];
    // Conservation check.
    std::vector<double> net_out(n, 0.0);
    for (std::size_t e = 0; e < m; ++e) {
      net_out[net.edges()[e].u] += sol.edge_flow[j][e];
      net_out[net.edges()[e].v] -= sol.edge_flow[j][e];
    }
    for (Vertex v = 0; v < n; ++v)
      if (v != c.s && v != c.t && std::abs(net_out[v]) > tol * std::max(1.0, scale))
        throw InputError("infeasible flow: conservation violated at '" + net.id(v) + "'");

    // Remaining flow as directed arcs: (edge, forward?) with amount.
    std::vector<double> f = sol.edge_flow[j];
    for (auto& x : f)
      if (std::abs(x) <= zero) x = 0;
    auto out_arc = [&](Vertex v) -> std::pair<std::size_t, Vertex> {
      for (const auto& [w, e] : net.adjacency()[v]) {
        double x = f[e];
        bool forward = net.edges()[e].u == v;
        if ((forward && x > 0) || (!forward && x < 0)) return {e, w};
      }
      return {detail::kNone, v};
    };
    for (std::size_t guard = 0; guard < 4 * m + 4; ++guard) {
      // Walk from s along positive arcs until t, cancelling any cycle met.
      std::vector<Vertex> walk{c.s};
      std::vector<std::size_t> arcs;
      std::vector<long> pos(n, -1);
      pos[c.s] = 0;
      bool stuck = false;
      while (walk.back() != c.t) {
        auto [e, w] = out_arc(walk.back());
        if (e == detail::kNone) {
          stuck = true;
          break;
        }
        if (pos[w] >= 0) {
          // Cycle w ... walk.back() -> w: cancel its bottleneck.
          std::size_t from = static_cast<std::size_t>(pos[w]);
          std::vector<std::size_t> cyc(arcs.begin() + static_cast<long>(from), arcs.end());
          cyc.push_back(e);
          double b = kInfinity;
          for (auto a : cyc) b = std::min(b, std::abs(f[a]));
          for (auto a : cyc) {
            f[a] -= f[a] > 0 ? b : -b;
            if (std::abs(f[a]) <= zero) f[a] = 0;
          }
          for (std::size_t i = from + 1; i < walk.size(); ++i) pos[walk[i]] = -1;
          walk.resize(from + 1);
          arcs.resize(from);
          continue;
        }
        pos[w] = static_cast<long>(walk.size());
        walk.push_back(w);
        arcs.push_back(e);
      }
      if (stuck) {
        if (walk.size() == 1) break;  // nothing leaves s
        // Numerical residue: drop the dead-end arc.
        f[arcs.back()] = 0;
        continue;
      }
      double b = kInfinity;
      for (auto a : arcs) b = std::min(b, std::abs(f[a]));
      for (auto a : arcs) {
        f[a] -= f[a] > 0 ? b : -b;
        if (std::abs(f[a]) <= zero) f[a] = 0;
      }
      DecomposedPath p;
      p.id = dec.next_id++;
      for (Vertex v : walk) p.vertices.push_back(net.id(v));
      p.amount = from_double(b);
      dec.paths.push_back(std::move(p));
    }
  }
  return dec;
}

/// One split of a path at an internal terminal s: parent a..s..b becomes
/// left a..s and right s..b, both carrying the parent's amount.
struct SplitRecord {
  std::size_t parent = 0;
  VertexId from, via, to;
  std::size_t left = 0, right = 0;
  Rational amount = 0;
};

using SplitLog = std::vector<SplitRecord>;

struct SpliceResult {
  FlowDecomposition decomposition;
  SplitLog log;
};

/// Splits every path at its internal terminals (first occurrence first)
/// until all paths are terminal-free. Edge loads are unchanged.
inline SpliceResult splice(const FlowDecomposition& dec) {
  SpliceResult out;
  out.decomposition.terminals = dec.terminals;
  out.decomposition.next_id = dec.next_id;
  std::deque<DecomposedPath> queue(dec.paths.begin(), dec.paths.end());
  while (!queue.empty()) {
    auto p = std::move(queue.front());
    queue.pop_front();
    std::size_t cut = 0;
    for (std::size_t i = 1; i + 1 < p.vertices.size() && !cut; ++i)
      if (dec.terminals.count(p.vertices[i])) cut = i;
    if (!cut) {
      out.decomposition.paths.push_back(std::move(p));
      continue;
    }
    DecomposedPath left{out.decomposition.next_id++, {p.vertices.begin(), p.vertices.begin() + static_cast<long>(cut) + 1}, p.amount};
    DecomposedPath right{out.decomposition.next_id++, {p.vertices.begin() + static_cast<long>(cut), p.vertices.end()}, p.amount};
    out.log.push_back({p.id, p.vertices.front(), p.vertices[cut], p.vertices.back(), left.id, right.id, p.amount});
    // Left has no internal terminal before the cut; right is examined again.
    out.decomposition.paths.push_back(std::move(left));
    queue.push_front(std::move(right));
  }
  return out;
}

/// Decomposition as a flow solution in net with lambda = 1 (each path one commodity entry).
inline FlowSolution to_flow_solution(const TerminalNetwork& net, const FlowDecomposition& dec) {
  FlowSolution sol;
  sol.lambda = 1;
  std::map<TerminalPair, std::size_t> index;
  for (const auto& [key, v] : dec.demand_exact()) {
    index[key] = sol.commodities.size();
    sol.commodities.push_back({net.index_of(key.first), net.index_of(key.second), to_double(v)});
  }
  sol.edge_flow.assign(sol.commodities.size(), std::vector<double>(net.num_edges(), 0.0));
  for (const auto& p : dec.paths) {
    auto key = make_pair_key(p.vertices.front(), p.vertices.back());
    std::size_t j = index[key];
    std::vector<Vertex> verts;
    for (const auto& id : p.vertices) verts.push_back(net.index_of(id));
    // Orient like the commodity.
    if (verts.front() != sol.commodities[j].s) std::reverse(verts.begin(), verts.end());
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
      Vertex a = verts[i], b = verts[i + 1];
      for (const auto& [w, e] : net.adjacency()[a]) {
        if (w != b) continue;
        sol.edge_flow[j][e] += (net.edges()[e].u == a ? 1.0 : -1.0) * to_double(p.amount);
        break;
      }
    }
    sol.paths.push_back({j, std::move(verts), to_double(p.amount)});
  }
  return sol;
}

/// Routes the original demand d in net_b, given a routing of the spliced
/// demand (sigma * d' for one concurrent factor sigma = route.lambda) and the
/// split log. Split pairs are reconnected in reverse split order: sigma * phi
/// of the flow from `from` to `via` is joined to sigma * phi from `via` to
/// `to`. The result routes sigma * d with the same total edge loads.
inline FlowSolution unsplice_route(const TerminalNetwork& net_b, const DemandVector& d, const FlowSolution& route,
                                   const SplitLog& log, double tol = 1e-6) {
  // Replay the log on d to obtain the spliced demand and check it against the route.
  std::map<TerminalPair, Rational> dem;
  for (const auto& [key, v] : d.entries()) dem[key] = from_double(v);
  for (const auto& r : log) {
    auto& parent = dem[make_pair_key(r.from, r.to)];
    parent -= r.amount;
    if (to_double(parent) < -tol * std::max(1.0, to_double(r.amount))) throw InputError("split log inconsistent with the demand");
    dem[make_pair_key(r.from, r.via)] += r.amount;
    dem[make_pair_key(r.via, r.to)] += r.amount;
  }
  const double sigma = route.lambda;
  const Rational sig = from_double(sigma);
  std::map<TerminalPair, double> routed;
  for (const auto& c : route.commodities)
    routed[make_pair_key(net_b.id(c.s), net_b.id(c.t))] += sigma * c.demand;
  for (const auto& [key, v] : dem) {
    double want = sigma * to_double(v);
    double have = routed.count(key) ? routed[key] : 0.0;
    if (std::abs(want - have) > tol * std::max(1.0, want)) throw InputError("route does not carry the spliced demand of the log");
  }

  // Pools of oriented walks per unordered pair.
  struct Walk {
    std::vector<VertexId> vertices;
    Rational amount;
  };
  std::map<TerminalPair, std::deque<Walk>> pool;
  auto dec = decompose_flow(net_b, route, tol);
  for (auto& p : dec.paths) pool[make_pair_key(p.vertices.front(), p.vertices.back())].push_back({p.vertices, p.amount});

  // Removes `amount` of a-to-b walks from the pool, splitting walks as needed.
  auto take = [&](const VertexId& a, const VertexId& b, Rational amount) {
    std::vector<Walk> out;
    auto& q = pool[make_pair_key(a, b)];
    while (amount > 0 && !q.empty()) {
      Walk w = q.front();
      q.pop_front();
      if (w.vertices.front() != a) std::reverse(w.vertices.begin(), w.vertices.end());
      if (w.amount > amount) {
        q.push_front({w.vertices, w.amount - amount});
        w.amount = amount;
      }
      amount -= w.amount;
      out.push_back(std::move(w));
    }
    if (to_double(amount) > tol * std::max(1.0, sigma)) throw InputError("split log inconsistent with the route");
    return out;
  };
  for (auto it = log.rbegin(); it != log.rend(); ++it) {
    auto left = take(it->from, it->via, sig * it->amount);
    auto right = take(it->via, it->to, sig * it->amount);
    // Zip the two lists by amount.
    std::size_t i = 0, j = 0;
    auto& dst = pool[make_pair_key(it->from, it->to)];
    while (i < left.size() && j < right.size()) {
      Rational a = std::min(left[i].amount, right[j].amount);
      Walk w;
      w.vertices = left[i].vertices;
      w.vertices.insert(w.vertices.end(), right[j].vertices.begin() + 1, right[j].vertices.end());
      w.amount = a;
      dst.push_back(std::move(w));
      left[i].amount -= a;
      right[j].amount -= a;
      if (left[i].amount == 0) ++i;
      if (right[j].amount == 0) ++j;
    }
  }

  FlowSolution out;
  out.lambda = sigma;
  std::map<TerminalPair, std::size_t> index;
  for (const auto& [key, v] : d.entries()) {
    index[key] = out.commodities.size();
    out.commodities.push_back({net_b.index_of(key.first), net_b.index_of(key.second), v});
  }
  out.edge_flow.assign(out.commodities.size(), std::vector<double>(net_b.num_edges(), 0.0));
  for (auto& [key, q] : pool) {
    for (auto& w : q) {
      if (w.amount == 0) continue;
      auto it = index.find(key);
      if (it == index.end()) {
        if (to_double(w.amount) > tol * std::max(1.0, sigma)) throw InputError("flow left on a pair outside the demand");
        continue;
      }
      std::size_t j = it->second;
      std::vector<Vertex> verts;
      for (const auto& id : w.vertices) verts.push_back(net_b.index_of(id));
      if (verts.front() != out.commodities[j].s) std::reverse(verts.begin(), verts.end());
      for (std::size_t s = 0; s + 1 < verts.size(); ++s) {
        for (const auto& [nb, e] : net_b.adjacency()[verts[s]]) {
          if (nb != verts[s + 1]) continue;
          out.edge_flow[j][e] += (net_b.edges()[e].u == verts[s] ? 1.0 : -1.0) * to_double(w.amount);
          break;
        }
      }
      out.paths.push_back({j, std::move(verts), to_double(w.amount)});
    }
  }
  return out;
}

/// Glues two sparsifiers along phi. The claimed quality is the larger of the two.
inline Sparsifier compose(const TerminalNetwork& g1p, const TerminalNetwork& g2p, const TerminalMap& phi, double q1,
                          double q2) {
  if (q1 < 1 || q2 < 1) throw InputError("sparsifier qualities must be at least 1");
  Sparsifier out{phi_merge(g1p, g2p, phi), "compose", std::max(q1, q2), {}, {}};
  out.params["q1"] = std::to_string(q1);
  out.params["q2"] = std::to_string(q2);
  return out;
}

}  // namespace flowsparse
