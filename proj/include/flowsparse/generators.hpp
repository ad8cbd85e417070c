#pragma once

// Seeded random instance generators. Every generator is deterministic in its
// seed and returns connected networks with integer capacities.

#include "flowsparse/structured.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace flowsparse::gen {

inline VertexId terminal_name(std::size_t i) { return "t" + std::to_string(i); }
inline VertexId vertex_name(std::size_t i) { return "v" + std::to_string(i); }

/// Quasi-bipartite network with independent terminals t0..t{k-1} and n_mid
/// non-terminals, each joined to between 2 and min(k, max_degree) random
/// terminals. Terminal pairs left without a common neighbour get one.
inline TerminalNetwork quasi_bipartite(std::size_t k, std::size_t n_mid, std::uint64_t seed, int max_cap = 10,
                                       std::size_t max_degree = 4) {
  if (k < 2) throw InputError("quasi-bipartite generator needs k >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cap(1, max_cap);
  std::vector<VertexId> ids, terms;
  for (std::size_t i = 0; i < k; ++i) {
    ids.push_back(terminal_name(i));
    terms.push_back(ids.back());
  }
  std::vector<NamedEdge> edges;
  std::vector<std::vector<char>> covered(k, std::vector<char>(k, 0));
  std::size_t next = 0;
  auto add_middle = [&](const std::vector<std::size_t>& nbrs) {
    ids.push_back(vertex_name(next++));
    for (auto i : nbrs) edges.push_back({ids.back(), terms[i], Rational(cap(rng))});
    for (auto i : nbrs)
      for (auto j : nbrs) covered[i][j] = 1;
  };
  std::vector<std::size_t> perm(k);
  for (std::size_t v = 0; v < n_mid; ++v) {
    for (std::size_t i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_int_distribution<std::size_t> deg(2, std::max<std::size_t>(2, std::min(k, max_degree)));
    add_middle({perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(deg(rng))});
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (!covered[i][j]) add_middle({i, j});
  return TerminalNetwork(ids, terms, edges);
}

/// Network whose non-terminals form components of 1..w vertices (paths),
/// each attached to random terminals.
inline TerminalNetwork bounded_components(std::size_t k, std::size_t comps, std::size_t w, std::uint64_t seed,
                                          int max_cap = 10) {
  if (k < 2 || w == 0) throw InputError("bounded-component generator needs k >= 2 and w >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cap(1, max_cap);
  std::uniform_int_distribution<std::size_t> pick_t(0, k - 1);
  std::vector<VertexId> ids, terms;
  for (std::size_t i = 0; i < k; ++i) {
    ids.push_back(terminal_name(i));
    terms.push_back(ids.back());
  }
  std::vector<NamedEdge> edges;
  std::size_t next = 0;
  for (std::size_t c = 0; c < comps; ++c) {
    std::size_t size = 1 + rng() % w;
    std::vector<VertexId> comp;
    for (std::size_t i = 0; i < size; ++i) {
      ids.push_back(vertex_name(next++));
      if (!comp.empty()) edges.push_back({comp.back(), ids.back(), Rational(cap(rng))});
      comp.push_back(ids.back());
    }
    edges.push_back({comp.front(), terms[pick_t(rng)], Rational(cap(rng))});
    edges.push_back({comp.back(), terms[pick_t(rng)], Rational(cap(rng))});
  }
  // A ring through all terminals keeps the network connected.
  for (std::size_t i = 0; i < k; ++i) {
    ids.push_back(vertex_name(next++));
    edges.push_back({ids.back(), terms[i], Rational(cap(rng))});
    edges.push_back({ids.back(), terms[(i + 1) % k], Rational(cap(rng))});
  }
  return TerminalNetwork(ids, terms, edges);
}

struct SpInstance {
  TerminalNetwork net;
  SpTree tree;
};

/// Random series-parallel network on n >= 2 vertices: starting from one
/// edge, repeatedly replace a random leaf edge by a series pair or by a
/// parallel pair (edge plus a two-edge path). k random vertices become
/// terminals; the root portals are always among them when k >= 2.
inline SpInstance series_parallel(std::size_t n, std::size_t k, std::uint64_t seed, int max_cap = 10) {
  if (n < 2) throw InputError("series-parallel generator needs n >= 2");
  if (k > n) throw InputError("more terminals than vertices");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cap(1, max_cap);
  SpTree tree;
  std::vector<VertexId> names{vertex_name(0), vertex_name(1)};
  tree.nodes.push_back({SpNode::Kind::Leaf, names[0], names[1], Rational(cap(rng)), {}, -1, -1});
  tree.root = 0;
  std::vector<int> leaves{0};
  auto leaf = [&](const VertexId& a, const VertexId& b) {
    tree.nodes.push_back({SpNode::Kind::Leaf, a, b, Rational(cap(rng)), {}, -1, -1});
    leaves.push_back(static_cast<int>(tree.nodes.size()) - 1);
    return leaves.back();
  };
  while (names.size() < n) {
    std::size_t pos = rng() % leaves.size();
    int l = leaves[pos];
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pos));
    // Turn the leaf in place into an internal node so parents stay valid.
    VertexId a = tree.nodes[l].s, b = tree.nodes[l].t;
    VertexId x = vertex_name(names.size());
    names.push_back(x);
    if (rng() % 2 == 0) {
      int left = leaf(a, x), right = leaf(x, b);
      tree.nodes[l] = {SpNode::Kind::Series, a, b, 0, x, left, right};
    } else {
      int direct = leaf(a, b);
      int p1 = leaf(a, x), p2 = leaf(x, b);
      tree.nodes.push_back({SpNode::Kind::Series, a, b, 0, x, p1, p2});
      tree.nodes[l] = {SpNode::Kind::Parallel, a, b, 0, {}, direct, static_cast<int>(tree.nodes.size()) - 1};
    }
  }
  std::vector<VertexId> terms;
  if (k >= 2) {
    terms = {names[0], names[1]};
    std::vector<VertexId> rest(names.begin() + 2, names.end());
    std::shuffle(rest.begin(), rest.end(), rng);
    terms.insert(terms.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(k - 2));
  } else if (k == 1) {
    terms = {names[rng() % names.size()]};
  }
  SpInstance out{tree.realize(terms), tree};
  out.net = TerminalNetwork(out.net.ids(), terms, out.net.named_edges());
  return out;
}

/// Random series-parallel network whose decomposition tree is a complete
/// binary tree of the given depth (2^depth leaves). Each internal node is
/// series or parallel with equal probability; k random vertices become
/// terminals, root portals first.
inline SpInstance series_parallel_depth(std::size_t depth, std::size_t k, std::uint64_t seed, int max_cap = 10) {
  if (depth > 16) throw InputError("series-parallel depth must be at most 16");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cap(1, max_cap);
  SpTree tree;
  std::vector<VertexId> names{vertex_name(0), vertex_name(1)};
  std::function<int(VertexId, VertexId, std::size_t)> grow = [&](VertexId a, VertexId b, std::size_t d) -> int {
    if (d == 0) {
      tree.nodes.push_back({SpNode::Kind::Leaf, a, b, Rational(cap(rng)), {}, -1, -1});
      return static_cast<int>(tree.nodes.size()) - 1;
    }
    SpNode node;
    node.s = a;
    node.t = b;
    if (rng() % 2 == 0) {
      node.kind = SpNode::Kind::Series;
      node.middle = vertex_name(names.size());
      names.push_back(node.middle);
      node.left = grow(a, node.middle, d - 1);
      node.right = grow(node.middle, b, d - 1);
    } else {
      node.kind = SpNode::Kind::Parallel;
      node.left = grow(a, b, d - 1);
      node.right = grow(a, b, d - 1);
    }
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  };
  tree.root = grow(names[0], names[1], depth);
  if (k > names.size()) throw InputError("more terminals than vertices");
  std::vector<VertexId> terms;
  std::vector<VertexId> rest(names.begin() + 2, names.end());
  std::shuffle(rest.begin(), rest.end(), rng);
  if (k >= 1) terms.push_back(names[0]);
  if (k >= 2) terms.push_back(names[1]);
  if (k > 2) terms.insert(terms.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(k - 2));
  auto realized = tree.realize(terms);
  return {TerminalNetwork(realized.ids(), terms, realized.named_edges()), tree};
}

struct TreewidthInstance {
  TerminalNetwork net;
  TreeDecomposition tdec;
};

/// Random tree on n vertices (treewidth 1); terminals are k random leaves
/// (or arbitrary vertices when there are fewer leaves). The decomposition
/// has one bag per tree edge.
inline TreewidthInstance random_tree(std::size_t n, std::size_t k, std::uint64_t seed, int max_cap = 10) {
  if (n < 2 || k > n) throw InputError("tree generator needs 2 <= n and k <= n");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cap(1, max_cap);
  std::vector<VertexId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(vertex_name(i));
  std::vector<NamedEdge> edges;
  std::vector<std::size_t> parent(n, 0), degree(n, 0);
  TreeDecomposition td;
  std::vector<std::size_t> bag_of_edge_to(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    parent[i] = rng() % i;
    edges.push_back({ids[i], ids[parent[i]], Rational(cap(rng))});
    ++degree[i];
    ++degree[parent[i]];
    td.bags.push_back({ids[parent[i]], ids[i]});
    bag_of_edge_to[i] = td.bags.size() - 1;
    // Attach to the bag of the edge above the parent, or to the first bag.
    if (i > 1) td.edges.emplace_back(td.bags.size() - 1, parent[i] == 0 ? 0 : bag_of_edge_to[parent[i]]);
  }
  std::vector<std::size_t> leaves, others;
  for (std::size_t i = 0; i < n; ++i) (degree[i] == 1 ? leaves : others).push_back(i);
  std::shuffle(leaves.begin(), leaves.end(), rng);
  std::shuffle(others.begin(), others.end(), rng);
  leaves.insert(leaves.end(), others.begin(), others.end());
  std::vector<VertexId> terms;
  for (std::size_t i = 0; i < k; ++i) terms.push_back(ids[leaves[i]]);
  return {TerminalNetwork(ids, terms, edges), td};
}

/// Random partial 2-tree on n >= 3 vertices (treewidth <= 2): start from a
/// triangle and repeatedly attach a new vertex to both ends of a random
/// edge. Each new vertex gets a bag {a, b, x} hanging off a bag holding {a, b}.
/// k random vertices become terminals.
inline TreewidthInstance random_two_tree(std::size_t n, std::size_t k, std::uint64_t seed, int max_cap = 10) {
  if (n < 3 || k > n) throw InputError("2-tree generator needs 3 <= n and k <= n");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cap(1, max_cap);
  std::vector<VertexId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(vertex_name(i));
  struct E {
    std::size_t a, b, bag;
  };
  std::vector<E> es{{0, 1, 0}, {1, 2, 0}, {0, 2, 0}};
  TreeDecomposition td;
  td.bags.push_back({ids[0], ids[1], ids[2]});
  for (std::size_t x = 3; x < n; ++x) {
    E e = es[rng() % es.size()];
    td.bags.push_back({ids[e.a], ids[e.b], ids[x]});
    std::size_t bag = td.bags.size() - 1;
    td.edges.emplace_back(bag, e.bag);
    es.push_back({e.a, x, bag});
    es.push_back({e.b, x, bag});
  }
  std::vector<NamedEdge> edges;
  for (const auto& e : es) edges.push_back({ids[e.a], ids[e.b], Rational(cap(rng))});
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<VertexId> terms;
  for (std::size_t i = 0; i < k; ++i) terms.push_back(ids[perm[i]]);
  return {TerminalNetwork(ids, terms, edges), td};
}

}  // namespace flowsparse::gen
