#pragma once

// Exact max-flow / min-cut by shortest augmenting paths (Edmonds-Karp) on
// undirected capacities. Cap may be Rational (exact) or double.

#include "flowsparse/graph_core.hpp"

#include <deque>
#include <limits>
#include <vector>

namespace flowsparse {

template <class Cap>
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : head_(n, npos) {}

  std::size_t add_vertex() {
    head_.push_back(npos);
    return head_.size() - 1;
  }

  /// Undirected edge: both arcs carry capacity c.
  void add_undirected(std::size_t u, std::size_t v, const Cap& c) {
    add_arc(u, v, c);
    add_arc(v, u, c);
    arcs_[arcs_.size() - 1].twin = arcs_.size() - 2;
    arcs_[arcs_.size() - 2].twin = arcs_.size() - 1;
  }

  /// Directed arc u->v with capacity c (reverse residual 0).
  void add_directed(std::size_t u, std::size_t v, const Cap& c) {
    add_arc(u, v, c);
    add_arc(v, u, Cap(0));
    arcs_[arcs_.size() - 1].twin = arcs_.size() - 2;
    arcs_[arcs_.size() - 2].twin = arcs_.size() - 1;
  }

  Cap run(std::size_t s, std::size_t t) {
    Cap total(0);
    const std::size_t n = head_.size();
    std::vector<std::size_t> via(n);
    for (;;) {
      std::fill(via.begin(), via.end(), npos);
      std::deque<std::size_t> queue{s};
      std::vector<char> seen(n, 0);
      seen[s] = 1;
      while (!queue.empty() && !seen[t]) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t a = head_[x]; a != npos; a = arcs_[a].next) {
          const Arc& arc = arcs_[a];
          if (seen[arc.to] || !(arc.residual > Cap(0))) continue;
          seen[arc.to] = 1;
          via[arc.to] = a;
          queue.push_back(arc.to);
        }
      }
      if (!seen[t]) break;
      Cap push = arcs_[via[t]].residual;
      for (std::size_t x = t; x != s; x = arcs_[arcs_[via[x]].twin].to)
        if (arcs_[via[x]].residual < push) push = arcs_[via[x]].residual;
      for (std::size_t x = t; x != s; x = arcs_[arcs_[via[x]].twin].to) {
        arcs_[via[x]].residual -= push;
        arcs_[arcs_[via[x]].twin].residual += push;
      }
      total += push;
    }
    return total;
  }

  /// Vertices reachable from s in the residual graph after run().
  [[nodiscard]] std::vector<char> source_side(std::size_t s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t a = head_[x]; a != npos; a = arcs_[a].next) {
        if (seen[arcs_[a].to] || !(arcs_[a].residual > Cap(0))) continue;
        seen[arcs_[a].to] = 1;
        stack.push_back(arcs_[a].to);
      }
    }
    return seen;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  struct Arc {
    std::size_t to;
    std::size_t next;
    std::size_t twin;
    Cap residual;
  };

  void add_arc(std::size_t u, std::size_t v, const Cap& c) {
    arcs_.push_back({v, head_[u], npos, c});
    head_[u] = arcs_.size() - 1;
  }

  std::vector<std::size_t> head_;
  std::vector<Arc> arcs_;
};

/// Exact max s-t flow value in net.
inline Rational max_flow(const TerminalNetwork& net, Vertex s, Vertex t) {
  if (s == t) throw InputError("max_flow needs distinct endpoints");
  MaxFlow<Rational> mf(net.num_vertices());
  for (const auto& e : net.edges()) mf.add_undirected(e.u, e.v, e.cap);
  return mf.run(s, t);
}

inline Rational max_flow(const TerminalNetwork& net, const VertexId& s, const VertexId& t) {
  Vertex a = net.index_of(s), b = net.index_of(t);
  if (!net.is_terminal(a) || !net.is_terminal(b)) throw InputError("max_flow endpoints must be terminals");
  return max_flow(net, a, b);
}

/// Min cut separating vertex sets A and B (super source / super sink).
/// Returns the value and the source side of a minimum cut.
inline std::pair<Rational, std::vector<char>> min_cut_between(const TerminalNetwork& net,
                                                              const std::vector<Vertex>& A,
                                                              const std::vector<Vertex>& B) {
  const std::size_t n = net.num_vertices();
  MaxFlow<Rational> mf(n + 2);
  for (const auto& e : net.edges()) mf.add_undirected(e.u, e.v, e.cap);
  Rational big(1);
  for (const auto& e : net.edges()) big += e.cap;
  for (Vertex a : A) mf.add_directed(n, a, big);
  for (Vertex b : B) mf.add_directed(b, n + 1, big);
  Rational value = mf.run(n, n + 1);
  auto side = mf.source_side(n);
  side.resize(n);
  return {value, side};
}

/// Minimum capacity cut separating terminal sets A and B, which must
/// partition the terminals into two nonempty parts.
inline Rational mincut_partition(const TerminalNetwork& net, const std::vector<VertexId>& A,
                                 const std::vector<VertexId>& B) {
  if (A.empty() || B.empty()) throw InputError("mincut_partition needs two nonempty terminal sets");
  std::vector<char> mark(net.num_vertices(), 0);
  std::vector<Vertex> a, b;
  for (const auto& id : A) {
    Vertex v = net.index_of(id);
    if (!net.is_terminal(v)) throw InputError("'" + id + "' is not a terminal");
    if (mark[v]++) throw InputError("terminal '" + id + "' listed twice");
    a.push_back(v);
  }
  for (const auto& id : B) {
    Vertex v = net.index_of(id);
    if (!net.is_terminal(v)) throw InputError("'" + id + "' is not a terminal");
    if (mark[v]++) throw InputError("terminal '" + id + "' listed twice");
    b.push_back(v);
  }
  if (a.size() + b.size() != net.num_terminals()) throw InputError("A and B must partition the terminal set");
  return min_cut_between(net, a, b).first;
}

/// Min cut value for the terminal bipartition encoded by `mask` over terminal
/// positions (bit i set means terminal i is on the A side).
inline Rational mincut_mask(const TerminalNetwork& net, std::uint64_t mask) {
  std::vector<Vertex> a, b;
  for (std::size_t i = 0; i < net.num_terminals(); ++i)
    ((mask >> i) & 1U ? a : b).push_back(net.terminals()[i]);
  return min_cut_between(net, a, b).first;
}

/// All 2^(k-1)-1 bipartition min cuts, indexed by mask over terminals
/// 0..k-2 (terminal k-1 always on the B side). Entry 0 is unused.
inline std::vector<Rational> all_bipartition_cuts(const TerminalNetwork& net) {
  const std::size_t k = net.num_terminals();
  if (k < 2) return {};
  if (k > 20) throw BudgetExceeded("bipartition enumeration over " + std::to_string(k) + " terminals");
  std::vector<Rational> out(std::size_t{1} << (k - 1));
  for (std::uint64_t m = 1; m < out.size(); ++m) out[m] = mincut_mask(net, m);
  return out;
}

}  // namespace flowsparse
