// flowsparse: command-line driver for the flow sparsifier library.
//
// Exit codes: 0 success, 1 verification failed, 2 input or structure
// error, 3 budget exceeded.

#include "flowsparse/demand_sketch.hpp"
#include "flowsparse/generators.hpp"
#include "flowsparse/io.hpp"
#include "flowsparse/merging.hpp"
#include "flowsparse/sampling.hpp"
#include "flowsparse/structured.hpp"
#include "flowsparse/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace flowsparse;
namespace fio = flowsparse::io;
using fio::json;

namespace {

struct GraphInput {
  std::string path;
  std::string format = "json";
  std::string terminals;  // dimacs sidecar

  void add_to(CLI::App* app, const std::string& flag, const std::string& what) {
    app->add_option(flag, path, what)->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "Input graph format")
        ->check(CLI::IsMember({"json", "dimacs"}))
        ->capture_default_str();
    app->add_option("--terminals", terminals, "Terminal sidecar for DIMACS input (JSON list or whitespace-separated ids)")
        ->check(CLI::ExistingFile);
  }

  [[nodiscard]] TerminalNetwork load(fio::RunManifest& m) const {
    m.add_input(path);
    if (format == "dimacs") {
      std::vector<VertexId> terms;
      if (!terminals.empty()) {
        m.add_input(terminals);
        terms = fio::terminals_from_sidecar(fio::read_text(terminals));
      }
      return fio::network_from_dimacs(fio::read_text(path), terms);
    }
    return fio::network_from_json(fio::read_json(path));
  }
};

class Timer {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_output(const std::string& path, const json& j, fio::RunManifest& m) {
  std::string text = j.dump(2) + "\n";
  fio::write_text(path, text);
  m.output_hashes[path] = fio::hash_hex(text);
}

void write_manifest(const std::string& out, fio::RunManifest& m, const Timer& timer) {
  m.seconds = timer.seconds();
  fio::write_json(out + ".manifest.json", m.to_json());
}

// "basis", "random:N", "disc:EPS:ETA[:LIMIT]" or a path to a demand file.
std::vector<DemandVector> resolve_demands(const std::string& spec, const TerminalNetwork& g, std::uint64_t seed,
                                          std::string& descriptor, fio::RunManifest& m) {
  auto parts = [&] {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      auto colon = spec.find(':', start);
      out.push_back(spec.substr(start, colon - start));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    return out;
  }();
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InputError("malformed demand spec '" + spec + "'");
    }
  };
  DemandGridSpec grid;
  if (parts[0] == "basis" && parts.size() == 1) {
    grid = DemandGridSpec::basis();
  } else if (parts[0] == "random" && parts.size() == 2) {
    grid = DemandGridSpec::random(static_cast<std::size_t>(num(parts[1])), seed);
  } else if (parts[0] == "disc" && (parts.size() == 3 || parts.size() == 4)) {
    grid = DemandGridSpec::disc(num(parts[1]), num(parts[2]),
                                parts.size() == 4 ? static_cast<std::size_t>(num(parts[3])) : 200, seed);
  } else {
    m.add_input(spec);
    descriptor = "file:" + spec;
    auto ds = fio::demands_from_json(fio::read_json(spec));
    for (const auto& d : ds) d.validate(g);
    return ds;
  }
  descriptor = grid.describe();
  return demand_grid(g, grid);
}

int cmd_gen(const std::string& kind, std::size_t k, std::size_t n, std::size_t w, std::size_t depth,
            std::size_t width, int max_cap, std::uint64_t seed, const std::string& out, std::string aux_out) {
  Timer timer;
  fio::RunManifest m;
  m.command = "gen " + kind;
  m.seed = seed;
  m.parameters = {{"kind", kind}, {"k", k}, {"n", n}, {"max_cap", max_cap}};
  auto aux_path = [&](const char* suffix) { return aux_out.empty() ? out + suffix : aux_out; };
  if (kind == "quasi-bipartite") {
    if (n < k) throw InputError("quasi-bipartite needs n >= k");
    write_output(out, fio::network_to_json(gen::quasi_bipartite(k, n - k, seed, max_cap)), m);
  } else if (kind == "bounded-component") {
    m.parameters["w"] = w;
    write_output(out, fio::network_to_json(gen::bounded_components(k, n, w, seed, max_cap)), m);
  } else if (kind == "sp") {
    auto inst = depth > 0 ? gen::series_parallel_depth(depth, k, seed, max_cap) : gen::series_parallel(n, k, seed, max_cap);
    m.parameters["depth"] = depth;
    write_output(out, fio::network_to_json(inst.net), m);
    write_output(aux_path(".sptree.json"), fio::sptree_to_json(inst.tree), m);
  } else if (kind == "treewidth") {
    if (width != 1 && width != 2) throw InputError("treewidth generator supports width 1 (trees) or 2 (2-trees)");
    auto inst = width == 1 ? gen::random_tree(n, k, seed, max_cap) : gen::random_two_tree(n, k, seed, max_cap);
    m.parameters["width"] = width;
    write_output(out, fio::network_to_json(inst.net), m);
    write_output(aux_path(".tdec.json"), fio::tdec_to_json(inst.tdec), m);
  } else {
    throw InputError("unknown generator '" + kind + "'");
  }
  write_manifest(out, m, timer);
  return 0;
}

struct SparsifyArgs {
  GraphInput graph;
  std::string method;
  std::string out;
  double eps = 0.25;
  double M = 0;
  std::uint64_t seed = 0;
  std::size_t w = 0;
  std::string sptree, tdec, leaf = "identity", demands;
  std::size_t leaf_terminals = 0;
  std::size_t jobs = 0;
  std::optional<double> claim;
};

int cmd_sparsify(const SparsifyArgs& a) {
  Timer timer;
  fio::RunManifest m;
  m.command = "sparsify " + a.method;
  m.seed = a.seed;
  auto g = a.graph.load(m);
  m.parameters = {{"method", a.method}, {"eps", a.eps}, {"M", a.M}, {"w", a.w}};
  Sparsifier s;
  if (a.method == "clump") {
    std::string descriptor;
    auto ds = a.demands.empty()
                  ? demand_grid(subdivide_terminal_edges(g), DemandGridSpec::disc(a.eps, 0.1, 200, a.seed))
                  : resolve_demands(a.demands, g, a.seed, descriptor, m);
    s = profile_bucket_sparsifier(g, a.eps, ds, enumeration_budget(), a.jobs);
  } else if (a.method == "ratio") {
    s = ratio_type_sparsifier(g, a.eps);
  } else if (a.method == "sample") {
    if (!(a.M > 0)) throw InputError("--method sample needs --M > 0");
    s = sample_sparsifier(g, a.M, a.seed);
  } else if (a.method == "sample-grouped") {
    if (!(a.M > 0) || a.w == 0) throw InputError("--method sample-grouped needs --M > 0 and --w >= 1");
    s = grouped_sample_sparsifier(g, a.w, a.M, a.seed);
  } else if (a.method == "sp") {
    if (a.sptree.empty()) {
      s = sp_sparsifier(g);
    } else {
      m.add_input(a.sptree);
      s = sp_sparsifier(g, fio::sptree_from_json(fio::read_json(a.sptree)));
    }
  } else if (a.method == "treewidth") {
    if (a.tdec.empty()) throw InputError("--method treewidth needs --tdec");
    m.add_input(a.tdec);
    auto td = fio::tdec_from_json(fio::read_json(a.tdec));
    LeafBuilder leaf = a.leaf == "mimick" ? LeafBuilder(mimick_leaf) : LeafBuilder(identity_leaf);
    s = treewidth_sparsifier(g, td, leaf, {.leaf_terminals = a.leaf_terminals});
  } else {
    throw InputError("unknown method '" + a.method + "'");
  }
  if (a.claim) {
    if (!(*a.claim >= 1)) throw InputError("--claim must be at least 1");
    s.claimed_quality = *a.claim;
  }
  write_output(a.out, fio::sparsifier_to_json(s), m);
  write_manifest(a.out, m, timer);
  std::cout << s.method << ": " << g.num_vertices() << " -> " << s.net.num_vertices()
            << " vertices, claimed quality " << s.claimed_quality << "\n";
  return 0;
}

struct VerifyArgs {
  GraphInput g, gp;
  std::string demands = "random:100";
  std::optional<double> claim;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  double tol = 1e-6;
  bool cuts = false;
};

int cmd_verify(const VerifyArgs& a) {
  Timer timer;
  fio::RunManifest m;
  m.command = "verify";
  m.seed = a.seed;
  auto g = a.g.load(m);
  auto gp_json = a.gp.format == "json" ? std::optional<json>(fio::read_json(a.gp.path)) : std::nullopt;
  auto gp = a.gp.load(m);
  double claim = 1;
  if (a.claim) {
    claim = *a.claim;
  } else if (gp_json && gp_json->contains("meta")) {
    claim = gp_json->at("meta").value("claimed_quality", 1.0);
  }
  std::string descriptor;
  auto ds = resolve_demands(a.demands, g, a.seed, descriptor, m);
  auto rep = certify(g, gp, ds, claim, a.jobs, a.tol, descriptor);
  json out = fio::report_to_json(rep);
  if (a.cuts) out["cuts"] = fio::cut_report_to_json(certify_cuts(g, gp));
  m.parameters = {{"demands", a.demands}, {"claim", claim}, {"tolerance", a.tol}};
  if (!a.out.empty()) {
    write_output(a.out, out, m);
    write_manifest(a.out, m, timer);
  }
  std::cout << (rep.pass ? "PASS" : "FAIL") << " lower=" << rep.lower << " upper=" << rep.upper << " claimed=" << claim
            << " demands=" << rep.records.size() << " (" << descriptor << ")\n";
  return rep.pass ? 0 : 1;
}

int cmd_sketch_build(const GraphInput& graph, double eps, const std::string& out, std::size_t jobs) {
  Timer timer;
  fio::RunManifest m;
  m.command = "sketch build";
  auto g = graph.load(m);
  m.parameters = {{"eps", eps}};
  auto sk = build_sketch(g, eps, enumeration_budget(), jobs);
  write_output(out, fio::sketch_to_json(sk), m);
  write_manifest(out, m, timer);
  std::cout << "sketch: " << sk.dict.size() << " stored vectors, " << sk.oracle_calls << " oracle calls\n";
  return 0;
}

int cmd_sketch_query(const std::string& sk_path, const std::string& demand_path) {
  auto sk = fio::sketch_from_json(fio::read_json(sk_path));
  auto ds = fio::demands_from_json(fio::read_json(demand_path));
  json out = json::array();
  for (const auto& d : ds) out.push_back(sketch_query(sk, d));
  std::cout << (ds.size() == 1 ? out[0] : out).dump() << "\n";
  return 0;
}

int cmd_plan(double eps, std::size_t k, double fail) {
  std::cout << fio::plan_to_json(plan_oversampling(eps, k, fail)).dump(2) << "\n";
  return 0;
}

int cmd_lambda(const GraphInput& graph, const std::string& demand_path, bool terminal_free) {
  fio::RunManifest m;
  auto g = graph.load(m);
  auto ds = fio::demands_from_json(fio::read_json(demand_path));
  json out = json::array();
  for (const auto& d : ds) {
    d.validate(g);
    out.push_back(terminal_free ? lambda_terminal_free(g, d).value : lambda_value(g, d));
  }
  std::cout << (ds.size() == 1 ? out[0] : out).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertex flow sparsifiers for terminal networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fio::kToolVersion);

  // gen
  std::string gen_kind, gen_out, gen_aux;
  std::size_t gen_k = 4, gen_n = 20, gen_w = 3, gen_depth = 0, gen_width = 2;
  int gen_cap = 10;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded random instance");
  gen_cmd->add_option("kind", gen_kind, "Instance family")
      ->required()
      ->check(CLI::IsMember({"quasi-bipartite", "sp", "bounded-component", "treewidth"}));
  gen_cmd->add_option("--k", gen_k, "Number of terminals")->capture_default_str();
  gen_cmd->add_option("--n", gen_n, "Vertices (components for bounded-component)")->capture_default_str();
  gen_cmd->add_option("--w", gen_w, "Largest component of G \\ T (bounded-component)")->capture_default_str();
  gen_cmd->add_option("--depth", gen_depth, "Decomposition depth for sp (2^depth leaves); 0 uses --n")
      ->capture_default_str();
  gen_cmd->add_option("--width", gen_width, "Treewidth (1 or 2) for treewidth")->capture_default_str();
  gen_cmd->add_option("--max-cap", gen_cap, "Capacities are integers in [1, max-cap]")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output graph file")->required();
  gen_cmd->add_option("--aux-out", gen_aux, "Output for the sp tree or tree decomposition (default: <out>.sptree.json / <out>.tdec.json)");

  // sparsify
  SparsifyArgs sp;
  auto* sp_cmd = app.add_subcommand("sparsify", "Build a flow sparsifier");
  sp.graph.add_to(sp_cmd, "--graph", "Input graph");
  sp_cmd->add_option("--method", sp.method, "Construction")
      ->required()
      ->check(CLI::IsMember({"clump", "ratio", "sample", "sample-grouped", "sp", "treewidth"}));
  sp_cmd->add_option("--out", sp.out, "Output sparsifier file")->required();
  sp_cmd->add_option("--eps", sp.eps, "Accuracy for clump and ratio")->capture_default_str();
  sp_cmd->add_option("--M", sp.M, "Oversampling factor for sample methods");
  sp_cmd->add_option("--seed", sp.seed, "Random seed")->capture_default_str();
  sp_cmd->add_option("--w", sp.w, "Component size bound for sample-grouped");
  sp_cmd->add_option("--sptree", sp.sptree, "Decomposition tree for sp (recognized when omitted)")
      ->check(CLI::ExistingFile);
  sp_cmd->add_option("--tdec", sp.tdec, "Tree decomposition for treewidth")->check(CLI::ExistingFile);
  sp_cmd->add_option("--leaf", sp.leaf, "Leaf builder for treewidth")
      ->check(CLI::IsMember({"identity", "mimick"}))
      ->capture_default_str();
  sp_cmd->add_option("--leaf-terminals", sp.leaf_terminals, "Leaf size for treewidth (0 = 6(w+1))")
      ->capture_default_str();
  sp_cmd->add_option("--demands", sp.demands, "Demand set for clump: basis, random:N, disc:EPS:ETA[:LIMIT] or a file");
  sp_cmd->add_option("--claim", sp.claim, "Override the recorded claimed quality");
  sp_cmd->add_option("--jobs", sp.jobs, "Worker threads (0 = all cores)")->capture_default_str();

  // verify
  VerifyArgs vf;
  auto* vf_cmd = app.add_subcommand("verify", "Certify a sparsifier against the original network");
  vf.g.add_to(vf_cmd, "--g", "Original graph");
  vf_cmd->add_option("--gp", vf.gp.path, "Sparsifier graph")->required()->check(CLI::ExistingFile);
  vf_cmd->add_option("--demands", vf.demands, "basis, random:N, disc:EPS:ETA[:LIMIT] or a demand file")
      ->capture_default_str();
  vf_cmd->add_option("--claim", vf.claim, "Claimed quality (default: the sparsifier's meta.claimed_quality)");
  vf_cmd->add_option("--tol", vf.tol, "Relative tolerance")->capture_default_str();
  vf_cmd->add_option("--out", vf.out, "Report file");
  vf_cmd->add_option("--seed", vf.seed, "Seed for random demand sets")->capture_default_str();
  vf_cmd->add_option("--jobs", vf.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  vf_cmd->add_flag("--cuts", vf.cuts, "Also compare all terminal bipartition min cuts");

  // sketch
  auto* sk_cmd = app.add_subcommand("sketch", "Build or query a demand sketch");
  sk_cmd->require_subcommand(1);
  GraphInput sk_graph;
  double sk_eps = 0.25;
  std::string sk_out, sk_file, sk_demand;
  std::size_t sk_jobs = 0;
  auto* skb = sk_cmd->add_subcommand("build", "Build a sketch of the routable demands");
  sk_graph.add_to(skb, "--graph", "Input graph");
  skb->add_option("--eps", sk_eps, "Accuracy in (0, 1/2)")->capture_default_str();
  skb->add_option("--out", sk_out, "Output sketch file")->required();
  skb->add_option("--jobs", sk_jobs, "Worker threads (0 = all cores)")->capture_default_str();
  auto* skq = sk_cmd->add_subcommand("query", "Estimate lambda for demands from a sketch");
  skq->add_option("--sk", sk_file, "Sketch file")->required()->check(CLI::ExistingFile);
  skq->add_option("--demand", sk_demand, "Demand file")->required()->check(CLI::ExistingFile);

  // plan
  double pl_eps = 0.5, pl_fail = 0.1;
  std::size_t pl_k = 5;
  auto* pl_cmd = app.add_subcommand("plan", "Oversampling factor M for a target failure probability");
  pl_cmd->add_option("--eps", pl_eps, "Accuracy in (0, 1)")->capture_default_str();
  pl_cmd->add_option("--k", pl_k, "Number of terminals")->capture_default_str();
  pl_cmd->add_option("--fail", pl_fail, "Target failure probability")->capture_default_str();

  // lambda
  GraphInput lm_graph;
  std::string lm_demand;
  bool lm_tf = false;
  auto* lm_cmd = app.add_subcommand("lambda", "Concurrent flow value for demands");
  lm_graph.add_to(lm_cmd, "--graph", "Input graph");
  lm_cmd->add_option("--demand", lm_demand, "Demand file")->required()->check(CLI::ExistingFile);
  lm_cmd->add_flag("--terminal-free", lm_tf, "Forbid terminals as internal path vertices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen_cmd)
      return cmd_gen(gen_kind, gen_k, gen_n, gen_w, gen_depth, gen_width, gen_cap, gen_seed, gen_out, gen_aux);
    if (*sp_cmd) return cmd_sparsify(sp);
    if (*vf_cmd) {
      vf.gp.format = vf.g.format;
      vf.gp.terminals = vf.g.terminals;
      return cmd_verify(vf);
    }
    if (*skb) return cmd_sketch_build(sk_graph, sk_eps, sk_out, sk_jobs);
    if (*skq) return cmd_sketch_query(sk_file, sk_demand);
    if (*pl_cmd) return cmd_plan(pl_eps, pl_k, pl_fail);
    if (*lm_cmd) return cmd_lambda(lm_graph, lm_demand, lm_tf);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
