#pragma once

// Sparsifiers for structured networks: cut-to-flow translation, the exact
// mimicking fit for at most four terminals, exact series-parallel
// sparsifiers over a decomposition tree, and the treewidth recursion over
// balanced bag separators.

#include "flowsparse/lp/dense_simplex.hpp"
#include "flowsparse/maxflow.hpp"
#include "flowsparse/splice_compose.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace flowsparse {

// ---------------------------------------------------------------------------
// Cut-to-flow translation

/// Turns a quality-beta cut sparsifier into a flow sparsifier given the
/// flow-cut gaps gamma_g of G and gamma_gp of G'. Contraction-based inputs
/// keep their capacities and get quality beta * gamma_g; otherwise the
/// capacities are scaled by gamma_gp and the quality is beta * gamma_g * gamma_gp.
inline Sparsifier translate_cut_sparsifier(const TerminalNetwork& gp, double gamma_gp, double beta, double gamma_g,
                                           bool contraction_based) {
  if (!(gamma_gp >= 1) || !(beta >= 1) || !(gamma_g >= 1))
    throw InputError("flow-cut gaps and cut quality must be at least 1");
  Sparsifier out;
  out.method = "translate";
  if (contraction_based) {
    out.net = gp;
    out.claimed_quality = beta * gamma_g;
  } else {
    out.net = scale_capacities(gp, from_double(gamma_gp));
    out.claimed_quality = beta * gamma_g * gamma_gp;
  }
  out.params["beta"] = std::to_string(beta);
  out.params["gamma_g"] = std::to_string(gamma_g);
  out.params["gamma_gp"] = std::to_string(gamma_gp);
  out.params["contraction_based"] = contraction_based ? "true" : "false";
  return out;
}

// ---------------------------------------------------------------------------
// Mimicking networks for k <= 4

namespace detail {

// Cut of a clique-plus-hub candidate for bipartition mask m, with the hub on
// the side given by hub_on_a. Variables: clique edges (i<j), then hub edges.
inline std::vector<Rational> candidate_cut_row(std::size_t k, std::uint64_t m, bool with_hub, bool hub_on_a) {
  const std::size_t pairs = k * (k - 1) / 2;
  std::vector<Rational> row(pairs + (with_hub ? k : 0), Rational(0));
  auto side_a = [&](std::size_t i) { return i + 1 < k && ((m >> i) & 1U); };
  std::size_t p = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j, ++p)
      if (side_a(i) != side_a(j)) row[p] = 1;
  if (with_hub)
    for (std::size_t i = 0; i < k; ++i)
      if (side_a(i) != hub_on_a) row[pairs + i] = 1;
  return row;
}

// Solves for candidate capacities with the given hub placement per
// bipartition (empty = no hub). Returns the capacities when feasible.
inline std::optional<std::vector<Rational>> fit_candidate(std::size_t k, const std::vector<Rational>& cuts,
                                                          const std::vector<char>& hub_on_a, bool with_hub) {
  const std::size_t pairs = k * (k - 1) / 2;
  lp::DenseLp<Rational> prog(pairs + (with_hub ? k : 0));
  for (auto& c : prog.objective) c = -1;
  for (std::uint64_t m = 1; m < cuts.size(); ++m) {
    bool a = with_hub && hub_on_a[m];
    prog.add_row(lp::RowSense::Equal, cuts[m]).coeffs = candidate_cut_row(k, m, with_hub, a);
    if (with_hub) {
      // The chosen hub side must be the cheaper one.
      auto here = candidate_cut_row(k, m, true, a);
      auto there = candidate_cut_row(k, m, true, !a);
      auto& row = prog.add_row(lp::RowSense::LessEqual, Rational(0));
      for (std::size_t j = pairs; j < here.size(); ++j) row.coeffs[j] = here[j] - there[j];
    }
  }
  auto res = lp::solve_dense(prog);
  if (res.status != lp::LpStatus::Optimal) return std::nullopt;
  return res.x;
}

}  // namespace detail

/// Network on the terminals plus at most one extra vertex whose terminal
/// bipartition min cuts equal those of net exactly (k <= 4). Tries a
/// terminal clique first, then a clique plus a hub adjacent to every
/// terminal, solving the cut equalities as an exact linear program.
inline TerminalNetwork mimick_small(const TerminalNetwork& net) {
  const std::size_t k = net.num_terminals();
  if (k > 4) throw InputError("mimicking fit needs at most 4 terminals, got " + std::to_string(k));
  auto tids = net.terminal_ids();
  if (k <= 1) return TerminalNetwork(tids, tids, {}, {.allow_disconnected = true});
  const auto cuts = all_bipartition_cuts(net);
  const std::size_t pairs = k * (k - 1) / 2;
  std::set<VertexId> taken(tids.begin(), tids.end());
  const VertexId hub = fresh_id("x", taken);

  auto build = [&](const std::vector<Rational>& x, bool with_hub) {
    std::vector<VertexId> ids = tids;
    std::vector<NamedEdge> edges;
    std::size_t p = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j, ++p)
        if (x[p] != 0) edges.push_back({tids[i], tids[j], x[p]});
    bool hub_used = false;
    if (with_hub)
      for (std::size_t i = 0; i < k; ++i)
        if (x[pairs + i] != 0) {
          edges.push_back({hub, tids[i], x[pairs + i]});
          hub_used = true;
        }
    if (hub_used) ids.push_back(hub);
    return TerminalNetwork(ids, tids, edges, {.allow_disconnected = true});
  };

  std::optional<TerminalNetwork> fit;
  if (auto x = detail::fit_candidate(k, cuts, {}, false)) fit = build(*x, false);
  const std::size_t masks = cuts.size() - 1;
  for (std::uint64_t s = 0; !fit && s < (std::uint64_t{1} << masks); ++s) {
    std::vector<char> hub_on_a(cuts.size(), 0);
    for (std::size_t m = 1; m < cuts.size(); ++m) hub_on_a[m] = (s >> (m - 1)) & 1U;
    if (auto x = detail::fit_candidate(k, cuts, hub_on_a, true)) fit = build(*x, true);
  }
  if (!fit) throw InternalError("mimicking fit failed");
  if (all_bipartition_cuts(*fit) != cuts) throw InternalError("mimicking fit failed: cut values differ");
  return *fit;
}

// ---------------------------------------------------------------------------
// Series-parallel decomposition trees

struct SpNode {
  enum class Kind { Leaf, Series, Parallel };
  Kind kind = Kind::Leaf;
  /// Portals. A leaf is the edge {s, t}.
  VertexId s, t;
  Rational cap = 0;      // leaf
  VertexId middle;       // series
  int left = -1, right = -1;
};

/// Binary series-parallel decomposition tree; nodes[root] is the root.
struct SpTree {
  std::vector<SpNode> nodes;
  int root = -1;

  /// Checks child portals against each node's composition rule.
  void validate() const {
    if (root < 0 || static_cast<std::size_t>(root) >= nodes.size()) throw InputError("sp tree has no root");
    auto same = [](const VertexId& a, const VertexId& b, const VertexId& c, const VertexId& d) {
      return (a == c && b == d) || (a == d && b == c);
    };
    std::vector<char> seen(nodes.size(), 0);
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      if (seen[i]++) throw InputError("sp tree node " + std::to_string(i) + " reached twice");
      const auto& n = nodes[i];
      if (n.s == n.t) throw InputError("sp tree node " + std::to_string(i) + " has equal portals");
      if (n.kind == SpNode::Kind::Leaf) {
        if (n.cap < 0) throw InputError("sp tree leaf with negative capacity");
        continue;
      }
      for (int c : {n.left, n.right})
        if (c < 0 || static_cast<std::size_t>(c) >= nodes.size()) throw InputError("sp tree child index out of range");
      const auto& l = nodes[n.left];
      const auto& r = nodes[n.right];
      bool ok = n.kind == SpNode::Kind::Parallel
                    ? same(l.s, l.t, n.s, n.t) && same(r.s, r.t, n.s, n.t)
                    : same(l.s, l.t, n.s, n.middle) && same(r.s, r.t, n.middle, n.t);
      if (!ok) throw InputError("sp tree node " + std::to_string(i) + " has inconsistent child portals");
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }

  /// Leaves of the subtree at node.
  [[nodiscard]] std::vector<int> leaves(int node) const {
    std::vector<int> out, stack{node};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      if (nodes[i].kind == SpNode::Kind::Leaf) {
        out.push_back(i);
      } else {
        stack.push_back(nodes[i].right);
        stack.push_back(nodes[i].left);
      }
    }
    return out;
  }

  /// Internal (non-portal) vertices of the subtree at node.
  [[nodiscard]] std::set<VertexId> internal_vertices(int node) const {
    std::set<VertexId> out;
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const auto& n = nodes[stack.back()];
      stack.pop_back();
      if (n.kind == SpNode::Kind::Leaf) continue;
      if (n.kind == SpNode::Kind::Series) out.insert(n.middle);
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
    return out;
  }

  /// Network realized by the tree with the given terminals.
  [[nodiscard]] TerminalNetwork realize(const std::vector<VertexId>& terminals) const {
    validate();
    std::set<VertexId> verts{nodes[root].s, nodes[root].t};
    auto inner = internal_vertices(root);
    verts.insert(inner.begin(), inner.end());
    std::vector<NamedEdge> edges;
    for (int i : leaves(root)) edges.push_back({nodes[i].s, nodes[i].t, nodes[i].cap});
    return TerminalNetwork({verts.begin(), verts.end()}, terminals, edges, {.allow_disconnected = true});
  }
};

namespace detail {

// Series/parallel reduction between portals s and t. Returns the tree, or
// nothing when the graph does not reduce to a single s-t edge.
inline std::optional<SpTree> sp_reduce(const TerminalNetwork& net, Vertex s, Vertex t) {
  SpTree tree;
  struct Link {
    Vertex a, b;
    int node;
    bool alive;
  };
  std::vector<Link> links;
  std::vector<std::set<std::size_t>> inc(net.num_vertices());
  for (const auto& e : net.edges()) {
    tree.nodes.push_back({SpNode::Kind::Leaf, net.id(e.u), net.id(e.v), e.cap, {}, -1, -1});
    inc[e.u].insert(links.size());
    inc[e.v].insert(links.size());
    links.push_back({e.u, e.v, static_cast<int>(tree.nodes.size()) - 1, true});
  }
  auto add_link = [&](Vertex a, Vertex b, int node) {
    inc[a].insert(links.size());
    inc[b].insert(links.size());
    links.push_back({a, b, node, true});
  };
  auto kill = [&](std::size_t l) {
    links[l].alive = false;
    inc[links[l].a].erase(l);
    inc[links[l].b].erase(l);
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (Vertex v = 0; v < net.num_vertices(); ++v) {
      // Parallel merges at v.
      std::map<Vertex, std::size_t> by_other;
      for (std::size_t l : std::vector<std::size_t>(inc[v].begin(), inc[v].end())) {
        Vertex o = links[l].a == v ? links[l].b : links[l].a;
        auto [it, fresh] = by_other.emplace(o, l);
        if (fresh) continue;
        std::size_t first = it->second;
        tree.nodes.push_back({SpNode::Kind::Parallel, net.id(v), net.id(o), 0, {}, links[first].node, links[l].node});
        kill(first);
        kill(l);
        add_link(v, o, static_cast<int>(tree.nodes.size()) - 1);
        it->second = links.size() - 1;
        changed = true;
      }
      // Series contraction of a degree-2 internal vertex.
      if (v != s && v != t && inc[v].size() == 2) {
        std::size_t l1 = *inc[v].begin(), l2 = *std::next(inc[v].begin());
        Vertex a = links[l1].a == v ? links[l1].b : links[l1].a;
        Vertex b = links[l2].a == v ? links[l2].b : links[l2].a;
        if (a == b) continue;
        tree.nodes.push_back({SpNode::Kind::Series, net.id(a), net.id(b), 0, net.id(v), links[l1].node, links[l2].node});
        kill(l1);
        kill(l2);
        add_link(a, b, static_cast<int>(tree.nodes.size()) - 1);
        changed = true;
      }
    }
  }
  std::size_t alive = 0, last = 0;
  for (std::size_t l = 0; l < links.size(); ++l)
    if (links[l].alive) {
      ++alive;
      last = l;
    }
  if (alive != 1) return std::nullopt;
  if (!((links[last].a == s && links[last].b == t) || (links[last].a == t && links[last].b == s))) return std::nullopt;
  tree.root = links[last].node;
  auto& r = tree.nodes[tree.root];
  if (r.s != net.id(s)) {
    std::swap(r.s, r.t);
    if (r.kind == SpNode::Kind::Series) std::swap(r.left, r.right);
  }
  return tree;
}

}  // namespace detail

/// Decomposition tree of net with root portals s and t, built by repeated
/// parallel merging and degree-2 series contraction.
inline SpTree sp_recognize(const TerminalNetwork& net, const VertexId& s, const VertexId& t) {
  if (net.num_edges() == 0) throw StructureError("not series-parallel: network has no edges");
  auto tree = detail::sp_reduce(net, net.index_of(s), net.index_of(t));
  if (!tree) throw StructureError("not series-parallel between '" + s + "' and '" + t + "'");
  return *tree;
}

/// Decomposition tree with portals chosen automatically: terminal pairs
/// first, then every other vertex pair.
inline SpTree sp_recognize(const TerminalNetwork& net) {
  if (net.num_edges() == 0) throw StructureError("not series-parallel: network has no edges");
  const std::size_t n = net.num_vertices();
  std::vector<Vertex> order = net.terminals();
  for (Vertex v = 0; v < n; ++v)
    if (!net.is_terminal(v)) order.push_back(v);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (auto tree = detail::sp_reduce(net, order[i], order[j])) return *tree;
  throw StructureError("not series-parallel");
}

namespace detail {

struct SpBuilder {
  const TerminalNetwork& net;
  const SpTree& tree;
  std::set<VertexId> terminals;
  std::vector<std::set<VertexId>> inside;  // internal terminals per node

  std::set<VertexId> count_inside(int i) {
    const auto& n = tree.nodes[i];
    std::set<VertexId> out;
    if (n.kind != SpNode::Kind::Leaf) {
      auto l = count_inside(n.left), r = count_inside(n.right);
      out.insert(l.begin(), l.end());
      out.insert(r.begin(), r.end());
      if (n.kind == SpNode::Kind::Series && terminals.count(n.middle)) out.insert(n.middle);
    }
    inside[i] = out;
    return out;
  }

  [[nodiscard]] std::vector<VertexId> terminal_list(int i) const {
    std::vector<VertexId> out{tree.nodes[i].s, tree.nodes[i].t};
    out.insert(out.end(), inside[i].begin(), inside[i].end());
    return out;
  }

  // Subgraph of the given leaves with the given terminals.
  [[nodiscard]] TerminalNetwork piece(const std::vector<int>& leaf_ids, std::vector<VertexId> terms) const {
    std::set<VertexId> verts(terms.begin(), terms.end());
    std::vector<NamedEdge> edges;
    for (int l : leaf_ids) {
      const auto& n = tree.nodes[l];
      verts.insert(n.s);
      verts.insert(n.t);
      edges.push_back({n.s, n.t, n.cap});
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return TerminalNetwork({verts.begin(), verts.end()}, terms, edges, {.allow_disconnected = true});
  }

  static TerminalNetwork glue(const TerminalNetwork& a, const TerminalNetwork& b, const std::vector<VertexId>& keep) {
    auto merged = compose(a, b, shared_terminal_map(a, b), 1.0, 1.0).net;
    return restrict_terminals(merged, keep);
  }

  TerminalNetwork build(int i) {
    const auto& n = tree.nodes[i];
    const auto keep = terminal_list(i);
    if (inside[i].size() <= 2) return mimick_small(piece(tree.leaves(i), keep));
    const std::size_t k = inside[i].size();
    int cur = i;
    for (;;) {
      const auto& c = tree.nodes[cur];
      if (inside[c.left].size() == k)
        cur = c.left;
      else if (inside[c.right].size() == k)
        cur = c.right;
      else
        break;
    }
    const auto& c = tree.nodes[cur];
    if (c.kind == SpNode::Kind::Leaf) throw InternalError("sp recursion reached a leaf holding terminals");
    auto inner = glue(build(c.left), build(c.right), terminal_list(cur));
    if (cur == i) return inner;
    std::set<int> in_sub;
    for (int l : tree.leaves(cur)) in_sub.insert(l);
    std::vector<int> outer_leaves;
    for (int l : tree.leaves(i))
      if (!in_sub.count(l)) outer_leaves.push_back(l);
    auto outer = mimick_small(piece(outer_leaves, {n.s, n.t, c.s, c.t}));
    return glue(outer, inner, keep);
  }
};

}  // namespace detail

/// Exact flow sparsifier of a series-parallel network from its
/// decomposition tree. The root portals act as terminals during the
/// construction and are demoted afterwards unless they are terminals of net.
inline Sparsifier sp_sparsifier(const TerminalNetwork& net, const SpTree& tree) {
  tree.validate();
  if (!(tree.realize(net.terminal_ids()) == TerminalNetwork(net.ids(), net.terminal_ids(), net.named_edges(),
                                                            {.allow_disconnected = true})))
    throw InputError("sp tree does not realize the network");
  detail::SpBuilder b{net, tree, {}, std::vector<std::set<VertexId>>(tree.nodes.size())};
  const auto& root = tree.nodes[tree.root];
  for (const auto& id : net.terminal_ids())
    if (id != root.s && id != root.t) b.terminals.insert(id);
  b.count_inside(tree.root);
  auto built = b.build(tree.root);
  auto out_net = normalize(with_terminals(built, net.terminal_ids(), {.allow_disconnected = true}));
  Sparsifier out{out_net, "sp", 1.0, {}, {}};
  out.params["internal_terminals"] = std::to_string(b.inside[tree.root].size());
  out.params["size_bound"] = std::to_string((2 * std::max<std::size_t>(b.inside[tree.root].size(), 1) - 1) * 5 + 2);
  return out;
}

inline Sparsifier sp_sparsifier(const TerminalNetwork& net) { return sp_sparsifier(net, sp_recognize(net)); }

// ---------------------------------------------------------------------------
// Tree decompositions

struct TreeDecomposition {
  std::vector<std::vector<VertexId>> bags;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // between bag indices

  [[nodiscard]] std::size_t width() const {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return w == 0 ? 0 : w - 1;
  }

  /// Throws unless the bags form a tree that covers every vertex and edge
  /// of net and the bags holding each vertex are connected.
  void validate(const TerminalNetwork& net) const {
    const std::size_t nb = bags.size();
    if (nb == 0) throw InputError("tree decomposition has no bags");
    if (edges.size() != nb - 1) throw InputError("tree decomposition is not a tree");
    std::vector<std::vector<std::size_t>> adj(nb);
    for (auto [a, b] : edges) {
      if (a >= nb || b >= nb || a == b) throw InputError("tree decomposition edge out of range");
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<char> seen(nb, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (auto y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
    }
    if (count != nb) throw InputError("tree decomposition is not connected");
    std::vector<std::vector<std::size_t>> holders(net.num_vertices());
    for (std::size_t b = 0; b < nb; ++b)
      for (const auto& id : bags[b]) holders[net.index_of(id)].push_back(b);
    for (Vertex v = 0; v < net.num_vertices(); ++v) {
      if (holders[v].empty()) throw InputError("vertex '" + net.id(v) + "' is in no bag");
      std::set<std::size_t> in(holders[v].begin(), holders[v].end());
      std::vector<std::size_t> st{holders[v].front()};
      std::set<std::size_t> reached{holders[v].front()};
      while (!st.empty()) {
        auto x = st.back();
        st.pop_back();
        for (auto y : adj[x])
          if (in.count(y) && reached.insert(y).second) st.push_back(y);
      }
      if (reached.size() != in.size()) throw InputError("bags holding '" + net.id(v) + "' are not connected");
    }
    for (const auto& e : net.edges()) {
      std::set<std::size_t> a(holders[e.u].begin(), holders[e.u].end());
      bool covered = false;
      for (auto b : holders[e.v]) covered |= a.count(b) > 0;
      if (!covered) throw InputError("edge " + net.id(e.u) + "-" + net.id(e.v) + " is in no bag");
    }
  }

  /// Bags restricted to a vertex subset; still a valid decomposition of the induced subgraph.
  [[nodiscard]] TreeDecomposition restricted(const std::set<VertexId>& keep) const {
    TreeDecomposition out{bags, edges};
    for (auto& b : out.bags) std::erase_if(b, [&](const VertexId& id) { return !keep.count(id); });
    return out;
  }
};

namespace detail {

// Terminal counts of the components of G - X.
inline std::vector<std::size_t> component_terminal_counts(const TerminalNetwork& net, const std::vector<char>& removed,
                                                          const std::vector<char>& is_t) {
  std::vector<std::size_t> out;
  std::vector<char> seen(removed);
  for (Vertex s = 0; s < net.num_vertices(); ++s) {
    if (seen[s]) continue;
    std::size_t count = 0;
    std::vector<Vertex> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      count += is_t[v];
      for (const auto& [w, e] : net.adjacency()[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    out.push_back(count);
  }
  return out;
}

}  // namespace detail

/// A bag X of the decomposition such that every component of G - X holds
/// at most 2/3 |T \ X| vertices of T. Among valid bags, the one with the
/// smallest largest component wins (ties: smaller bag, then lower index).
inline std::optional<std::vector<VertexId>> find_balanced_terminal_separator(const TerminalNetwork& net,
                                                                             const TreeDecomposition& tdec,
                                                                             const std::vector<VertexId>& T) {
  std::vector<char> is_t(net.num_vertices(), 0);
  for (const auto& id : T) is_t[net.index_of(id)] = 1;
  std::optional<std::size_t> best;
  std::size_t best_max = 0;
  for (std::size_t b = 0; b < tdec.bags.size(); ++b) {
    std::vector<char> removed(net.num_vertices(), 0);
    std::size_t outside = T.size();
    for (const auto& id : tdec.bags[b]) {
      Vertex v = net.index_of(id);
      removed[v] = 1;
      outside -= is_t[v];
    }
    auto counts = detail::component_terminal_counts(net, removed, is_t);
    std::size_t mx = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    if (3 * mx > 2 * outside) continue;
    if (!best || mx < best_max || (mx == best_max && tdec.bags[b].size() < tdec.bags[*best].size())) {
      best = b;
      best_max = mx;
    }
  }
  if (!best) return std::nullopt;
  return tdec.bags[*best];
}

/// As find_balanced_terminal_separator; throws when no bag qualifies.
inline std::vector<VertexId> balanced_terminal_separator(const TerminalNetwork& net, const TreeDecomposition& tdec,
                                                         const std::vector<VertexId>& T) {
  auto X = find_balanced_terminal_separator(net, tdec, T);
  if (!X) throw InternalError("no bag is a balanced terminal separator");
  return *X;
}

/// Sparsifier for a network with few terminals: the result and its quality.
using LeafBuilder = std::function<Sparsifier(const TerminalNetwork&)>;

inline Sparsifier identity_leaf(const TerminalNetwork& net) { return Sparsifier{net, "identity", 1.0, {}, {}}; }

/// mimick_small when the leaf has at most four terminals, the identity otherwise.
inline Sparsifier mimick_leaf(const TerminalNetwork& net) {
  if (net.num_terminals() <= 4) return Sparsifier{mimick_small(net), "mimick", 1.0, {}, {}};
  auto out = identity_leaf(net);
  out.notes.push_back("leaf with " + std::to_string(net.num_terminals()) + " terminals kept as is");
  return out;
}

struct TreewidthOptions {
  /// Leaves are networks with at most this many terminals; 0 means 6(w+1).
  std::size_t leaf_terminals = 0;
};

namespace detail {

struct TreewidthStats {
  std::size_t depth = 0;
  std::size_t leaves = 0;
  double quality = 1;
  std::vector<std::string> notes;
};

inline TerminalNetwork treewidth_rec(const TerminalNetwork& net, const TreeDecomposition& tdec,
                                     const LeafBuilder& leaf, std::size_t threshold, std::size_t level,
                                     TreewidthStats& stats) {
  stats.depth = std::max(stats.depth, level);
  const auto T = net.terminal_ids();
  auto make_leaf = [&] {
    auto s = leaf(net);
    stats.quality = std::max(stats.quality, s.claimed_quality);
    ++stats.leaves;
    for (auto& n : s.notes) stats.notes.push_back(std::move(n));
    return s.net;
  };
  if (T.size() <= threshold) return make_leaf();
  auto found = find_balanced_terminal_separator(net, tdec, T);
  if (!found) {
    stats.notes.push_back("leaf with " + std::to_string(T.size()) + " terminals: no balanced bag");
    return make_leaf();
  }
  const auto& X = *found;
  std::set<VertexId> xs(X.begin(), X.end());
  std::vector<char> removed(net.num_vertices(), 0);
  for (const auto& id : X) removed[net.index_of(id)] = 1;
  // Components of G - X.
  std::vector<std::vector<Vertex>> comps;
  std::vector<char> seen(removed);
  for (Vertex s = 0; s < net.num_vertices(); ++s) {
    if (seen[s]) continue;
    comps.emplace_back();
    std::vector<Vertex> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      comps.back().push_back(v);
      for (const auto& [w, e] : net.adjacency()[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
  }
  for (const auto& comp : comps) {
    std::size_t inside = xs.size();
    for (Vertex v : comp) inside += net.is_terminal(v);
    if (inside >= T.size()) {
      stats.notes.push_back("leaf with " + std::to_string(T.size()) + " terminals: separator does not shrink a piece");
      return make_leaf();
    }
  }
  std::optional<TerminalNetwork> acc;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::set<VertexId> keep(X.begin(), X.end());
    std::vector<VertexId> terms(X.begin(), X.end());
    for (Vertex v : comps[i]) {
      keep.insert(net.id(v));
      if (net.is_terminal(v)) terms.push_back(net.id(v));
    }
    std::vector<NamedEdge> edges;
    for (const auto& e : net.edges()) {
      bool inx = xs.count(net.id(e.u)) && xs.count(net.id(e.v));
      // Edges inside X go to the first piece only.
      if (keep.count(net.id(e.u)) && keep.count(net.id(e.v)) && (!inx || i == 0))
        edges.push_back({net.id(e.u), net.id(e.v), e.cap});
    }
    TerminalNetwork gi({keep.begin(), keep.end()}, terms, edges, {.allow_disconnected = true});
    auto hi = treewidth_rec(gi, tdec.restricted(keep), leaf, threshold, level + 1, stats);
    acc = acc ? compose(*acc, hi, shared_terminal_map(*acc, hi), 1.0, 1.0).net : hi;
  }
  return restrict_terminals(*acc, T);
}

}  // namespace detail

/// Treewidth recursion: networks with at most 6(w+1) terminals go to the
/// leaf builder; larger ones are split at a balanced bag separator X into
/// the pieces G[V_i + X] with terminals (T cap V_i) + X, sparsified
/// recursively and glued back along X. Quality is the largest leaf quality.
inline Sparsifier treewidth_sparsifier(const TerminalNetwork& net, const TreeDecomposition& tdec,
                                       const LeafBuilder& leaf = identity_leaf, TreewidthOptions opts = {}) {
  tdec.validate(net);
  const std::size_t w = tdec.width();
  const std::size_t threshold = opts.leaf_terminals ? opts.leaf_terminals : 6 * (w + 1);
  detail::TreewidthStats stats;
  auto built = detail::treewidth_rec(net, tdec, leaf, threshold, 0, stats);
  Sparsifier out{normalize(with_terminals(built, net.terminal_ids(), {.allow_disconnected = true})), "treewidth",
                 stats.quality, {}, std::move(stats.notes)};
  out.params["width"] = std::to_string(w);
  out.params["leaf_terminals"] = std::to_string(threshold);
  out.params["depth"] = std::to_string(stats.depth);
  out.params["leaves"] = std::to_string(stats.leaves);
  out.notes.push_back("separators are bags of up to w+1 vertices");
  return out;
}

}  // namespace flowsparse
