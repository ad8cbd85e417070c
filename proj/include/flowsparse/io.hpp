#pragma once

// JSON (de)serialization of networks, demands, decomposition trees, tree
// decompositions, sketches, quality reports and run manifests, plus a
// DIMACS max-flow importer.

#include "flowsparse/demand_sketch.hpp"
#include "flowsparse/sampling.hpp"
#include "flowsparse/structured.hpp"
#include "flowsparse/verify.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace flowsparse::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": " + e.what());
  }
}

inline json read_json(const std::string& path) { return parse_json(read_text(path), path); }

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Numbers

/// Integers as JSON numbers, everything else as a "p/q" string.
inline json rational_to_json(const Rational& q) {
  if (denominator(q) == 1) {
    const auto& num = numerator(q);
    if (num >= std::numeric_limits<long long>::min() && num <= std::numeric_limits<long long>::max())
      return num.convert_to<long long>();
  }
  return to_string(q);
}

/// Accepts a JSON number (decimals read exactly) or a "p/q" string.
inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
  if (j.is_number_float()) return parse_rational(j.dump());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw InputError("expected a number or a \"p/q\" string, got " + j.dump());
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(what + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline std::string id_from_json(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw InputError(what + ": vertex ids must be strings");
}

template <class T>
T get_as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Networks

inline json network_to_json(const TerminalNetwork& net) {
  json edges = json::array();
  for (const auto& e : net.named_edges()) edges.push_back({{"u", e.u}, {"v", e.v}, {"cap", rational_to_json(e.cap)}});
  return {{"vertices", net.ids()}, {"terminals", net.terminal_ids()}, {"edges", edges}};
}

inline TerminalNetwork network_from_json(const json& j, NetworkOptions opts = {.allow_disconnected = true}) {
  const std::string what = "graph";
  std::vector<VertexId> ids, terms;
  for (const auto& v : detail::field(j, "vertices", what)) ids.push_back(detail::id_from_json(v, what));
  for (const auto& t : detail::field(j, "terminals", what)) terms.push_back(detail::id_from_json(t, what));
  std::vector<NamedEdge> edges;
  for (const auto& e : detail::field(j, "edges", what))
    edges.push_back({detail::id_from_json(detail::field(e, "u", "edge"), what),
                     detail::id_from_json(detail::field(e, "v", "edge"), what),
                     rational_from_json(detail::field(e, "cap", "edge"))});
  return TerminalNetwork(std::move(ids), terms, edges, opts);
}

inline json sparsifier_to_json(const Sparsifier& s) {
  json out = network_to_json(s.net);
  out["meta"] = {{"method", s.method}, {"claimed_quality", s.claimed_quality}, {"params", s.params}, {"notes", s.notes}};
  return out;
}

/// Network plus the provenance under "meta" when present.
inline Sparsifier sparsifier_from_json(const json& j) {
  Sparsifier s;
  s.net = network_from_json(j);
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    s.method = m.value("method", "");
    s.claimed_quality = m.value("claimed_quality", 1.0);
    if (m.contains("params"))
      for (const auto& [k, v] : m.at("params").items()) s.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
    if (m.contains("notes"))
      for (const auto& n : m.at("notes")) s.notes.push_back(n.is_string() ? n.get<std::string>() : n.dump());
  }
  return s;
}

// ---------------------------------------------------------------------------
// DIMACS max-flow import

/// Reads "p max n m", "n id s|t" and "a u v cap" lines; vertices are named by
/// their DIMACS number and arcs become undirected edges (antiparallel arcs are
/// summed). Terminals come from `terminals` when nonempty, else from the
/// source and sink lines.
inline TerminalNetwork network_from_dimacs(const std::string& text, const std::vector<VertexId>& terminals = {}) {
  std::istringstream in(text);
  std::string line;
  long n = -1;
  std::size_t lineno = 0;
  std::vector<VertexId> st;
  std::vector<NamedEdge> edges;
  auto fail = [&](const std::string& msg) {
    throw InputError("dimacs line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char kind = 0;
    ls >> kind;
    if (kind == 'p') {
      std::string fmt;
      long m = 0;
      if (!(ls >> fmt >> n >> m) || n <= 0 || m < 0) fail("malformed problem line");
    } else if (kind == 'n') {
      long v = 0;
      std::string role;
      if (!(ls >> v >> role)) fail("malformed node line");
      if (v < 1 || v > n) fail("node out of range");
      st.push_back(std::to_string(v));
    } else if (kind == 'a') {
      long u = 0, v = 0;
      std::string cap;
      if (n < 0) fail("arc before problem line");
      if (!(ls >> u >> v >> cap)) fail("malformed arc line");
      if (u < 1 || u > n || v < 1 || v > n) fail("arc endpoint out of range");
      if (u == v) continue;
      edges.push_back({std::to_string(u), std::to_string(v), parse_rational(cap)});
    } else {
      fail(std::string("unknown line type '") + kind + "'");
    }
  }
  if (n < 0) throw InputError("dimacs: missing problem line");
  std::vector<VertexId> ids;
  for (long v = 1; v <= n; ++v) ids.push_back(std::to_string(v));
  return TerminalNetwork(std::move(ids), terminals.empty() ? st : terminals, edges, {.allow_disconnected = true});
}

/// Terminal sidecar: a JSON list of ids, or whitespace-separated ids.
inline std::vector<VertexId> terminals_from_sidecar(const std::string& text) {
  std::vector<VertexId> out;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    for (const auto& t : parse_json(text, "terminal sidecar")) out.push_back(detail::id_from_json(t, "terminal sidecar"));
    return out;
  }
  std::istringstream in(text);
  for (std::string id; in >> id;) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------
// Demands

inline json demand_to_json(const DemandVector& d) {
  json out = json::array();
  for (const auto& [k, v] : d.entries()) out.push_back({{"s", k.first}, {"t", k.second}, {"d", v}});
  return out;
}

inline DemandVector demand_from_json(const json& j) {
  if (!j.is_array()) throw InputError("demand: expected a list of {\"s\",\"t\",\"d\"} objects");
  DemandVector d;
  for (const auto& e : j)
    d.add(detail::id_from_json(detail::field(e, "s", "demand"), "demand"),
          detail::id_from_json(detail::field(e, "t", "demand"), "demand"),
          to_double(rational_from_json(detail::field(e, "d", "demand"))));
  return d;
}

/// A single demand list, or a list of demand lists.
inline std::vector<DemandVector> demands_from_json(const json& j) {
  if (!j.is_array()) throw InputError("demand file: expected a JSON list");
  if (!j.empty() && j.front().is_array()) {
    std::vector<DemandVector> out;
    for (const auto& d : j) out.push_back(demand_from_json(d));
    return out;
  }
  return {demand_from_json(j)};
}

// ---------------------------------------------------------------------------
// Series-parallel trees and tree decompositions

inline json sptree_to_json(const SpTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json x = {{"s", n.s}, {"t", n.t}};
    switch (n.kind) {
      case SpNode::Kind::Leaf:
        x["kind"] = "leaf";
        x["cap"] = rational_to_json(n.cap);
        break;
      case SpNode::Kind::Series:
        x["kind"] = "series";
        x["middle"] = n.middle;
        x["left"] = n.left;
        x["right"] = n.right;
        break;
      case SpNode::Kind::Parallel:
        x["kind"] = "parallel";
        x["left"] = n.left;
        x["right"] = n.right;
        break;
    }
    nodes.push_back(x);
  }
  return {{"root", t.root}, {"nodes", nodes}};
}

inline SpTree sptree_from_json(const json& j) {
  const std::string what = "sp tree";
  SpTree t;
  t.root = detail::get_as<int>(detail::field(j, "root", what), what);
  for (const auto& x : detail::field(j, "nodes", what)) {
    SpNode n;
    auto kind = detail::get_as<std::string>(detail::field(x, "kind", what), what);
    n.s = detail::id_from_json(detail::field(x, "s", what), what);
    n.t = detail::id_from_json(detail::field(x, "t", what), what);
    if (kind == "leaf") {
      n.kind = SpNode::Kind::Leaf;
      n.cap = rational_from_json(detail::field(x, "cap", what));
    } else if (kind == "series" || kind == "parallel") {
      n.kind = kind == "series" ? SpNode::Kind::Series : SpNode::Kind::Parallel;
      if (kind == "series") n.middle = detail::id_from_json(detail::field(x, "middle", what), what);
      n.left = detail::get_as<int>(detail::field(x, "left", what), what);
      n.right = detail::get_as<int>(detail::field(x, "right", what), what);
    } else {
      throw InputError(what + ": unknown node kind '" + kind + "'");
    }
    t.nodes.push_back(std::move(n));
  }
  t.validate();
  return t;
}

inline json tdec_to_json(const TreeDecomposition& td) {
  json edges = json::array();
  for (auto [a, b] : td.edges) edges.push_back({a, b});
  return {{"bags", td.bags}, {"edges", edges}};
}

inline TreeDecomposition tdec_from_json(const json& j) {
  const std::string what = "tree decomposition";
  TreeDecomposition td;
  for (const auto& b : detail::field(j, "bags", what)) {
    td.bags.emplace_back();
    for (const auto& v : b) td.bags.back().push_back(detail::id_from_json(v, what));
  }
  for (const auto& e : detail::field(j, "edges", what)) {
    if (!e.is_array() || e.size() != 2) throw InputError(what + ": edges are [a, b] pairs");
    td.edges.emplace_back(detail::get_as<std::size_t>(e[0], what), detail::get_as<std::size_t>(e[1], what));
  }
  return td;
}

// ---------------------------------------------------------------------------
// Sketches

/// Header (k, eps, terminals, L) plus the stored exponent tuples, sorted;
/// a zero coordinate is written as null.
inline json sketch_to_json(const DemandSketch& sk) {
  json L = json::array();
  for (const auto& x : sk.L) L.push_back(rational_to_json(x));
  std::vector<std::vector<int>> tuples(sk.dict.begin(), sk.dict.end());
  std::sort(tuples.begin(), tuples.end());
  json entries = json::array();
  for (const auto& t : tuples) {
    json row = json::array();
    for (int x : t) row.push_back(x == kZeroExponent ? json(nullptr) : json(x));
    entries.push_back(row);
  }
  json pairs = json::array();
  for (auto [a, b] : sk.pairs) pairs.push_back({a, b});
  return {{"format", "flowsparse-sketch"},
          {"k", sk.k()},
          {"epsilon", sk.epsilon},
          {"epsilon_internal", sk.epsilon_internal},
          {"terminals", sk.terminals},
          {"pairs", pairs},
          {"L", L},
          {"candidate_space", sk.candidate_space},
          {"oracle_calls", sk.oracle_calls},
          {"entries", entries}};
}

inline DemandSketch sketch_from_json(const json& j) {
  const std::string what = "sketch";
  if (j.value("format", "") != "flowsparse-sketch") throw InputError("not a sketch file");
  DemandSketch sk;
  sk.epsilon = detail::get_as<double>(detail::field(j, "epsilon", what), what);
  sk.epsilon_internal = detail::get_as<double>(detail::field(j, "epsilon_internal", what), what);
  for (const auto& t : detail::field(j, "terminals", what)) sk.terminals.push_back(detail::id_from_json(t, what));
  for (const auto& p : detail::field(j, "pairs", what))
    sk.pairs.emplace_back(detail::get_as<std::size_t>(p.at(0), what), detail::get_as<std::size_t>(p.at(1), what));
  for (const auto& x : detail::field(j, "L", what)) sk.L.push_back(rational_from_json(x));
  if (sk.L.size() != sk.pairs.size()) throw InputError("sketch: L and pairs differ in length");
  sk.candidate_space = j.value("candidate_space", std::uint64_t{0});
  sk.oracle_calls = j.value("oracle_calls", std::uint64_t{0});
  for (const auto& row : detail::field(j, "entries", what)) {
    std::vector<int> t;
    for (const auto& x : row) t.push_back(x.is_null() ? kZeroExponent : detail::get_as<int>(x, what));
    if (t.size() != sk.pairs.size()) throw InputError("sketch: entry of the wrong length");
    sk.dict.insert(std::move(t));
  }
  return sk;
}

// ---------------------------------------------------------------------------
// Reports

inline json report_to_json(const QualityReport& r) {
  json records = json::array();
  for (const auto& x : r.records)
    records.push_back({{"demand", demand_to_json(x.demand)}, {"lambda_g", x.lambda_g}, {"lambda_gp", x.lambda_gp}});
  return {{"schema_version", QualityReport::kSchemaVersion},
          {"lower", r.lower},
          {"upper", r.upper},
          {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio},
          {"claimed", r.claimed},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"demand_set", r.demand_set},
          {"disclaimer", r.disclaimer},
          {"records", records}};
}

inline json cut_report_to_json(const CutReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.sides.size(); ++i)
    rows.push_back({{"side", r.sides[i]}, {"cut_g", rational_to_json(r.cut_g[i])}, {"cut_gp", rational_to_json(r.cut_gp[i])}});
  return {{"beta", rational_to_json(r.beta)}, {"min_ratio", rational_to_json(r.min_ratio)}, {"exact", r.exact},
          {"bipartitions", rows}};
}

inline json plan_to_json(const PlannerResult& p) {
  return {{"eps", p.eps},
          {"k", p.k},
          {"fail", p.fail},
          {"eta", p.eta},
          {"log_union", p.log_union},
          {"M", p.M},
          {"predicted_failure", p.predicted_failure},
          {"asymptotic_M", p.asymptotic_M}};
}

// ---------------------------------------------------------------------------
// Run manifests

inline std::string hash_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

struct RunManifest {
  std::string command;
  json parameters = json::object();
  std::uint64_t seed = 0;
  /// Input path -> FNV-1a hash of its bytes.
  std::map<std::string, std::string> input_hashes;
  std::map<std::string, std::string> output_hashes;
  double seconds = 0;

  void add_input(const std::string& path) { input_hashes[path] = hash_hex(read_text(path)); }

  [[nodiscard]] json to_json() const {
    return {{"command", command},         {"parameters", parameters},         {"seed", seed},
            {"inputs", input_hashes},     {"outputs", output_hashes},         {"tool_version", kToolVersion},
            {"timing", {{"seconds", seconds}}}};
  }
};

}  // namespace flowsparse::io
