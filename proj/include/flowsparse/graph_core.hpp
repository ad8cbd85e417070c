#pragma once

// Terminal networks, demand vectors, vertex partitions and the structural
// surgeries (subdivision, merging, phi-merge) the constructions build on.

#include "flowsparse/common.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flowsparse {

using VertexId = std::string;
using Vertex = std::size_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  Rational cap;
};

struct NamedEdge {
  VertexId u;
  VertexId v;
  Rational cap;
};

struct NetworkOptions {
  bool allow_disconnected = false;
};

/// An undirected, edge-capacitated graph with an ordered terminal list.
/// Immutable after construction. Construction normalizes: parallel edges are
/// summed, zero-capacity edges dropped and every edge stored with u < v in
/// sorted order.
class TerminalNetwork {
 public:
  TerminalNetwork() = default;

  TerminalNetwork(std::vector<VertexId> vertices, const std::vector<VertexId>& terminals,
                  const std::vector<NamedEdge>& edges, NetworkOptions options = {})
      : ids_(std::move(vertices)), allow_disconnected_(options.allow_disconnected) {
    build_index();
    std::vector<Vertex> term;
    term.reserve(terminals.size());
    for (const auto& t : terminals) term.push_back(index_of(t));
    std::vector<Edge> raw;
    raw.reserve(edges.size());
    for (const auto& e : edges) raw.push_back({index_of(e.u), index_of(e.v), e.cap});
    init(std::move(term), std::move(raw));
  }

  static TerminalNetwork from_indices(std::vector<VertexId> vertices, std::vector<Vertex> terminals,
                                      std::vector<Edge> edges, NetworkOptions options = {}) {
    TerminalNetwork net;
    net.ids_ = std::move(vertices);
    net.allow_disconnected_ = options.allow_disconnected;
    net.build_index();
    net.init(std::move(terminals), std::move(edges));
    return net;
  }

  [[nodiscard]] std::size_t num_vertices() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t num_edges() const noexcept { return edges_.size(); }
  [[nodiscard]] std::size_t num_terminals() const noexcept { return terminals_.size(); }

  [[nodiscard]] const std::vector<VertexId>& ids() const noexcept { return ids_; }
  [[nodiscard]] const VertexId& id(Vertex v) const { return ids_.at(v); }
  [[nodiscard]] const std::vector<Vertex>& terminals() const noexcept { return terminals_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] bool is_terminal(Vertex v) const { return terminal_pos_.at(v) >= 0; }
  /// Position of v in the terminal list, or -1.
  [[nodiscard]] int terminal_position(Vertex v) const { return terminal_pos_.at(v); }
  [[nodiscard]] bool allows_disconnected() const noexcept { return allow_disconnected_; }

  [[nodiscard]] std::optional<Vertex> find(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] Vertex index_of(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("unknown vertex id '" + id + "'");
    return it->second;
  }

  /// (neighbor, edge index) lists.
  [[nodiscard]] const std::vector<std::vector<std::pair<Vertex, std::size_t>>>& adjacency() const noexcept {
    return adjacency_;
  }

  [[nodiscard]] std::vector<double> capacities() const {
    std::vector<double> caps;
    caps.reserve(edges_.size());
    for (const auto& e : edges_) caps.push_back(to_double(e.cap));
    return caps;
  }

  [[nodiscard]] Rational capacity_between(Vertex a, Vertex b) const {
    for (const auto& [w, e] : adjacency_.at(a))
      if (w == b) return edges_[e].cap;
    return Rational(0);
  }

  [[nodiscard]] std::vector<NamedEdge> named_edges() const {
    std::vector<NamedEdge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({ids_[e.u], ids_[e.v], e.cap});
    return out;
  }

  [[nodiscard]] std::vector<VertexId> terminal_ids() const {
    std::vector<VertexId> out;
    for (Vertex t : terminals_) out.push_back(ids_[t]);
    return out;
  }

  [[nodiscard]] bool connected() const {
    if (ids_.empty()) return true;
    std::vector<char> seen(ids_.size(), 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (const auto& [w, e] : adjacency_[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == ids_.size();
  }

  /// Id-based structural equality: same vertex ids, same terminal order,
  /// same capacitated edge set. Index order is irrelevant.
  friend bool operator==(const TerminalNetwork& a, const TerminalNetwork& b) {
    if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges()) return false;
    if (a.terminal_ids() != b.terminal_ids()) return false;
    std::set<VertexId> av(a.ids_.begin(), a.ids_.end()), bv(b.ids_.begin(), b.ids_.end());
    if (av != bv) return false;
    auto canon = [](const TerminalNetwork& n) {
      std::map<std::pair<VertexId, VertexId>, Rational> m;
      for (const auto& e : n.edges_) {
        auto key = std::minmax(n.ids_[e.u], n.ids_[e.v]);
        m[{key.first, key.second}] = e.cap;
      }
      return m;
    };
    return canon(a) == canon(b);
  }

 private:
  void build_index() {
    index_.clear();
    for (Vertex v = 0; v < ids_.size(); ++v) {
      if (!index_.emplace(ids_[v], v).second) throw InputError("duplicate vertex id '" + ids_[v] + "'");
    }
  }

  void init(std::vector<Vertex> terminals, std::vector<Edge> raw) {
    terminal_pos_.assign(ids_.size(), -1);
    for (std::size_t i = 0; i < terminals.size(); ++i) {
      Vertex t = terminals[i];
      if (t >= ids_.size()) throw InputError("terminal index out of range");
      if (terminal_pos_[t] >= 0) throw InputError("duplicate terminal '" + ids_[t] + "'");
      terminal_pos_[t] = static_cast<int>(i);
    }
    terminals_ = std::move(terminals);

    std::map<std::pair<Vertex, Vertex>, Rational> merged;
    for (auto& e : raw) {
      if (e.u >= ids_.size() || e.v >= ids_.size()) throw InputError("edge endpoint out of range");
      if (e.u == e.v) throw InputError("self-loop at '" + ids_[e.u] + "'");
      if (e.cap < 0) throw InputError("negative capacity on edge " + ids_[e.u] + "-" + ids_[e.v]);
      auto key = std::minmax(e.u, e.v);
      merged[{key.first, key.second}] += e.cap;
    }
    edges_.clear();
    for (auto& [key, cap] : merged)
      if (cap != 0) edges_.push_back({key.first, key.second, cap});

    adjacency_.assign(ids_.size(), {});
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      adjacency_[edges_[i].u].emplace_back(edges_[i].v, i);
      adjacency_[edges_[i].v].emplace_back(edges_[i].u, i);
    }
    if (!allow_disconnected_ && !connected())
      throw InputError("network is disconnected (pass allow_disconnected to override)");
  }

  std::vector<VertexId> ids_;
  std::unordered_map<VertexId, Vertex> index_;
  std::vector<Vertex> terminals_;
  std::vector<int> terminal_pos_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> adjacency_;
  bool allow_disconnected_ = false;
};

// ---------------------------------------------------------------------------
// Demand vectors

using TerminalPair = std::pair<VertexId, VertexId>;

inline TerminalPair make_pair_key(const VertexId& a, const VertexId& b) {
  return a < b ? TerminalPair{a, b} : TerminalPair{b, a};
}

/// Nonnegative demand per unordered terminal pair, keyed by terminal id.
/// Absent keys are zero.
class DemandVector {
 public:
  DemandVector() = default;

  void set(const VertexId& s, const VertexId& t, double value) {
    if (s == t) throw InputError("demand between a terminal and itself: '" + s + "'");
    if (!(value >= 0) || !std::isfinite(value)) throw InputError("demand must be finite and nonnegative");
    auto key = make_pair_key(s, t);
    if (value == 0)
      entries_.erase(key);
    else
      entries_[key] = value;
  }

  void add(const VertexId& s, const VertexId& t, double value) { set(s, t, get(s, t) + value); }

  [[nodiscard]] double get(const VertexId& s, const VertexId& t) const {
    auto it = entries_.find(make_pair_key(s, t));
    return it == entries_.end() ? 0.0 : it->second;
  }

  [[nodiscard]] const std::map<TerminalPair, double>& entries() const noexcept { return entries_; }
  [[nodiscard]] bool is_zero() const noexcept { return entries_.empty(); }
  [[nodiscard]] std::size_t support_size() const noexcept { return entries_.size(); }

  [[nodiscard]] DemandVector scaled(double alpha) const {
    DemandVector out;
    for (const auto& [k, v] : entries_) out.set(k.first, k.second, v * alpha);
    return out;
  }

  /// Throws unless every key is a pair of distinct terminals of net.
  void validate(const TerminalNetwork& net) const {
    for (const auto& [k, v] : entries_) {
      for (const auto& id : {k.first, k.second}) {
        auto idx = net.find(id);
        if (!idx || !net.is_terminal(*idx)) throw InputError("demand references non-terminal '" + id + "'");
      }
    }
  }

  friend bool operator==(const DemandVector&, const DemandVector&) = default;

 private:
  std::map<TerminalPair, double> entries_;
};

/// Unordered terminal pairs (by terminal position i < j) in lexicographic order.
inline std::vector<std::pair<Vertex, Vertex>> terminal_pairs(const TerminalNetwork& net) {
  std::vector<std::pair<Vertex, Vertex>> out;
  const auto& T = net.terminals();
  for (std::size_t i = 0; i < T.size(); ++i)
    for (std::size_t j = i + 1; j < T.size(); ++j) out.emplace_back(T[i], T[j]);
  return out;
}

// ---------------------------------------------------------------------------
// Vertex partitions

struct VertexPartition {
  std::vector<std::vector<VertexId>> blocks;

  static VertexPartition singletons(const TerminalNetwork& net) {
    VertexPartition p;
    for (const auto& id : net.ids()) p.blocks.push_back({id});
    return p;
  }

  /// Blocks sorted internally and ordered by their smallest id; empty blocks dropped.
  [[nodiscard]] VertexPartition canonical() const {
    VertexPartition out;
    for (auto b : blocks) {
      if (b.empty()) continue;
      std::sort(b.begin(), b.end());
      out.blocks.push_back(std::move(b));
    }
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
  }

  /// Block index per vertex of net. Throws on overlap, missing coverage,
  /// unknown ids, or a block holding two distinct terminals.
  [[nodiscard]] std::vector<std::size_t> block_of(const TerminalNetwork& net) const {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> owner(net.num_vertices(), unset);
    std::size_t block_index = 0;
    for (const auto& b : blocks) {
      if (b.empty()) continue;
      int terminals_in_block = 0;
      for (const auto& id : b) {
        Vertex v = net.index_of(id);
        if (owner[v] != unset) throw InputError("vertex '" + id + "' appears in two blocks");
        owner[v] = block_index;
        if (net.is_terminal(v)) ++terminals_in_block;
      }
      if (terminals_in_block > 1) throw InputError("partition block merges two distinct terminals");
      ++block_index;
    }
    for (Vertex v = 0; v < owner.size(); ++v)
      if (owner[v] == unset) throw InputError("partition does not cover vertex '" + net.id(v) + "'");
    return owner;
  }

  friend bool operator==(const VertexPartition& a, const VertexPartition& b) {
    return a.canonical().blocks == b.canonical().blocks;
  }
};

// ---------------------------------------------------------------------------
// Helpers

/// Returns base if unused, else base~1, base~2, ...
inline VertexId fresh_id(const VertexId& base, const std::set<VertexId>& taken) {
  if (!taken.count(base)) return base;
  for (std::size_t i = 1;; ++i) {
    VertexId cand = base + "~" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

/// Same graph with a different terminal list (by id).
inline TerminalNetwork with_terminals(const TerminalNetwork& net, const std::vector<VertexId>& terminals,
                                      NetworkOptions options) {
  return TerminalNetwork(net.ids(), terminals, net.named_edges(), options);
}

/// Subnetwork induced by `vertices` (edges with both ends inside), with the given terminals.
inline TerminalNetwork induced_subnetwork(const TerminalNetwork& net, const std::vector<Vertex>& vertices,
                                          const std::vector<Vertex>& terminals) {
  std::vector<std::size_t> local(net.num_vertices(), static_cast<std::size_t>(-1));
  std::vector<VertexId> ids;
  for (Vertex v : vertices) {
    if (local[v] != static_cast<std::size_t>(-1)) continue;
    local[v] = ids.size();
    ids.push_back(net.id(v));
  }
  std::vector<Vertex> term;
  for (Vertex t : terminals) {
    if (local[t] == static_cast<std::size_t>(-1)) throw InputError("terminal outside induced vertex set");
    term.push_back(local[t]);
  }
  std::vector<Edge> edges;
  for (const auto& e : net.edges())
    if (local[e.u] != static_cast<std::size_t>(-1) && local[e.v] != static_cast<std::size_t>(-1))
      edges.push_back({local[e.u], local[e.v], e.cap});
  return TerminalNetwork::from_indices(std::move(ids), std::move(term), std::move(edges), {.allow_disconnected = true});
}

/// Terminal-to-terminal edges absent and no non-terminal/non-terminal edge.
inline bool is_bipartite_terminal_network(const TerminalNetwork& net) {
  for (const auto& e : net.edges())
    if (net.is_terminal(e.u) == net.is_terminal(e.v)) return false;
  return true;
}

/// Non-terminals form an independent set.
inline bool is_quasi_bipartite(const TerminalNetwork& net) {
  for (const auto& e : net.edges())
    if (!net.is_terminal(e.u) && !net.is_terminal(e.v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Operations

/// Canonical form: terminals first (in terminal order), remaining vertices in
/// id order; parallel edges summed, zero edges dropped. Flow values are
/// unchanged for every demand.
inline TerminalNetwork normalize(const TerminalNetwork& net) {
  std::vector<VertexId> order;
  for (Vertex t : net.terminals()) order.push_back(net.id(t));
  std::vector<VertexId> rest;
  for (Vertex v = 0; v < net.num_vertices(); ++v)
    if (!net.is_terminal(v)) rest.push_back(net.id(v));
  std::sort(rest.begin(), rest.end());
  order.insert(order.end(), rest.begin(), rest.end());
  return TerminalNetwork(std::move(order), net.terminal_ids(), net.named_edges(),
                         {.allow_disconnected = net.allows_disconnected()});
}

/// Replaces each terminal-terminal edge {s,t,c} by a path s-x-t with both
/// edges of capacity c; x is a fresh non-terminal.
inline TerminalNetwork subdivide_terminal_edges(const TerminalNetwork& net) {
  std::set<VertexId> taken(net.ids().begin(), net.ids().end());
  std::vector<VertexId> ids = net.ids();
  std::vector<NamedEdge> edges;
  bool changed = false;
  for (const auto& e : net.edges()) {
    if (net.is_terminal(e.u) && net.is_terminal(e.v)) {
      VertexId x = fresh_id("sub:" + net.id(e.u) + ":" + net.id(e.v), taken);
      taken.insert(x);
      ids.push_back(x);
      edges.push_back({net.id(e.u), x, e.cap});
      edges.push_back({x, net.id(e.v), e.cap});
      changed = true;
    } else {
      edges.push_back({net.id(e.u), net.id(e.v), e.cap});
    }
  }
  if (!changed) return net;
  return TerminalNetwork(std::move(ids), net.terminal_ids(), edges, {.allow_disconnected = net.allows_disconnected()});
}

/// Contracts every block of the partition into one vertex. A block holding a
/// terminal takes the terminal's id; other blocks take their smallest id.
/// Capacities between blocks are summed, intra-block edges vanish.
inline TerminalNetwork merge_vertices(const TerminalNetwork& net, const VertexPartition& partition) {
  auto owner = partition.block_of(net);
  std::size_t nblocks = 0;
  for (auto b : owner) nblocks = std::max(nblocks, b + 1);
  std::vector<std::optional<VertexId>> name(nblocks);
  std::vector<bool> has_terminal(nblocks, false);
  for (Vertex v = 0; v < net.num_vertices(); ++v) {
    auto b = owner[v];
    if (net.is_terminal(v)) {
      name[b] = net.id(v);
      has_terminal[b] = true;
    } else if (!has_terminal[b] && (!name[b] || net.id(v) < *name[b])) {
      name[b] = net.id(v);
    }
  }
  std::vector<VertexId> ids;
  for (auto& n : name) ids.push_back(*n);
  std::vector<Vertex> terms;
  for (Vertex t : net.terminals()) terms.push_back(owner[t]);
  std::vector<Edge> edges;
  for (const auto& e : net.edges())
    if (owner[e.u] != owner[e.v]) edges.push_back({owner[e.u], owner[e.v], e.cap});
  return TerminalNetwork::from_indices(std::move(ids), std::move(terms), std::move(edges),
                                       {.allow_disconnected = net.allows_disconnected()});
}

/// Pairs (terminal of g1, terminal of g2) to identify.
using TerminalMap = std::vector<std::pair<VertexId, VertexId>>;

/// Identification map pairing terminals that carry the same id in both networks.
inline TerminalMap shared_terminal_map(const TerminalNetwork& g1, const TerminalNetwork& g2) {
  TerminalMap phi;
  for (Vertex t : g1.terminals()) {
    auto other = g2.find(g1.id(t));
    if (other && g2.is_terminal(*other)) phi.emplace_back(g1.id(t), g1.id(t));
  }
  return phi;
}

/// Glues g1 and g2 by identifying the terminal pairs in phi. Identified
/// vertices keep their g1 id. The terminal list is g1's terminals followed by
/// g2's unmatched terminals. Unmatched g2 vertices whose id collides with a
/// g1 id are renamed if they are non-terminals; colliding terminals are an error.
inline TerminalNetwork phi_merge(const TerminalNetwork& g1, const TerminalNetwork& g2, const TerminalMap& phi,
                                 NetworkOptions options = {.allow_disconnected = true}) {
  std::map<Vertex, Vertex> g2_to_g1;
  std::set<Vertex> sources;
  for (const auto& [a, b] : phi) {
    auto ia = g1.find(a);
    auto ib = g2.find(b);
    if (!ia || !g1.is_terminal(*ia)) throw InputError("phi-merge: '" + a + "' is not a terminal of the first network");
    if (!ib || !g2.is_terminal(*ib)) throw InputError("phi-merge: '" + b + "' is not a terminal of the second network");
    if (!sources.insert(*ia).second) throw InputError("phi-merge: duplicate source '" + a + "'");
    if (!g2_to_g1.emplace(*ib, *ia).second) throw InputError("phi-merge: duplicate target '" + b + "'");
  }
  std::vector<VertexId> ids = g1.ids();
  std::set<VertexId> taken(ids.begin(), ids.end());
  std::vector<Vertex> g2_index(g2.num_vertices());
  for (Vertex v = 0; v < g2.num_vertices(); ++v) {
    if (auto it = g2_to_g1.find(v); it != g2_to_g1.end()) {
      g2_index[v] = it->second;
      continue;
    }
    VertexId name = g2.id(v);
    if (taken.count(name)) {
      if (g2.is_terminal(v))
        throw InputError("phi-merge: unmatched terminal '" + name + "' collides with a vertex of the first network");
      name = fresh_id(name, taken);
    }
    taken.insert(name);
    g2_index[v] = ids.size();
    ids.push_back(name);
  }
  std::vector<Vertex> terms = g1.terminals();
  for (Vertex t : g2.terminals())
    if (!g2_to_g1.count(t)) terms.push_back(g2_index[t]);
  std::vector<Edge> edges = g1.edges();
  for (const auto& e : g2.edges()) edges.push_back({g2_index[e.u], g2_index[e.v], e.cap});
  return TerminalNetwork::from_indices(std::move(ids), std::move(terms), std::move(edges), options);
}

/// Connected components of G[V \ T], each sorted, ordered by smallest vertex index.
inline std::vector<std::vector<Vertex>> components_after_terminal_removal(const TerminalNetwork& net) {
  std::vector<std::vector<Vertex>> comps;
  std::vector<char> seen(net.num_vertices(), 0);
  for (Vertex start = 0; start < net.num_vertices(); ++start) {
    if (seen[start] || net.is_terminal(start)) continue;
    std::vector<Vertex> comp;
    std::vector<Vertex> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (const auto& [w, e] : net.adjacency()[v]) {
        if (!seen[w] && !net.is_terminal(w)) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

/// Drops the terminal flag from every vertex not listed in `keep`.
inline TerminalNetwork restrict_terminals(const TerminalNetwork& net, const std::vector<VertexId>& keep) {
  std::vector<VertexId> terms;
  std::set<VertexId> wanted(keep.begin(), keep.end());
  for (Vertex t : net.terminals())
    if (wanted.count(net.id(t))) terms.push_back(net.id(t));
  return TerminalNetwork(net.ids(), terms, net.named_edges(), {.allow_disconnected = net.allows_disconnected()});
}

/// Multiplies every capacity by factor (> 0).
inline TerminalNetwork scale_capacities(const TerminalNetwork& net, const Rational& factor) {
  std::vector<Edge> edges = net.edges();
  for (auto& e : edges) e.cap *= factor;
  return TerminalNetwork::from_indices(net.ids(), net.terminals(), std::move(edges),
                                       {.allow_disconnected = net.allows_disconnected()});
}

}  // namespace flowsparse

namespace flowsparse {

/// A constructed sparsifier with its provenance: the method, its parameters
/// and the quality the construction claims (certified separately).
struct Sparsifier {
  TerminalNetwork net;
  std::string method;
  double claimed_quality = 1.0;
  std::map<std::string, std::string> params;
  std::vector<std::string> notes;
};

}  // namespace flowsparse
