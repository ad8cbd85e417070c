#pragma once

// Graph-free (1+eps)-approximate concurrent-flow oracle: a dictionary of all
// feasible demand vectors whose coordinates are zero or powers of (1+eps')
// in [eps'/k^2 * L_ij, L_ij], plus the single-commodity maxima L_ij.
// eps' = eps/4 internally; the query guarantee is then a clean (1+eps).

#include "flowsparse/flow_lp.hpp"
#include "flowsparse/maxflow.hpp"
#include "flowsparse/parallel.hpp"

#include <atomic>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_set>
#include <vector>

namespace flowsparse {

/// Exponent of a zero coordinate.
constexpr int kZeroExponent = INT_MIN;

struct ExponentTupleHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct DemandSketch {
  double epsilon = 0;           // user-facing accuracy
  double epsilon_internal = 0;  // grid ratio is 1 + epsilon_internal
  std::vector<VertexId> terminals;
  /// Terminal position pairs (i < j), lexicographic; coordinates follow this order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<Rational> L;
  std::unordered_set<std::vector<int>, ExponentTupleHash> dict;

  // Build statistics.
  std::uint64_t candidate_space = 0;
  std::uint64_t oracle_calls = 0;

  [[nodiscard]] std::size_t k() const noexcept { return terminals.size(); }
  [[nodiscard]] double ratio() const noexcept { return 1.0 + epsilon_internal; }

  [[nodiscard]] double value_of(int exponent) const {
    return exponent == kZeroExponent ? 0.0 : std::pow(ratio(), exponent);
  }

  /// Smallest and largest grid exponent for coordinate p.
  [[nodiscard]] std::pair<int, int> exponent_range(std::size_t p) const {
    const double kk = static_cast<double>(k() * k());
    const double lo = epsilon_internal / kk * to_double(L[p]);
    const double hi = to_double(L[p]);
    const double lr = std::log(ratio());
    int jmin = static_cast<int>(std::ceil(std::log(lo) / lr - 1e-9));
    int jmax = static_cast<int>(std::floor(std::log(hi) / lr + 1e-9));
    return {jmin, jmax};
  }

  /// Storage bound (1 + (1/eps') log_{1+eps'}(k^2/eps'))^(k choose 2), as a double.
  [[nodiscard]] double storage_bound() const {
    const double e = epsilon_internal;
    const double kk = static_cast<double>(k() * k());
    return std::pow(1.0 + (1.0 / e) * std::log(kk / e) / std::log1p(e), static_cast<double>(pairs.size()));
  }

  /// Machine-word count in the cost model: one word per stored coordinate plus one per L_ij.
  [[nodiscard]] std::uint64_t words() const { return dict.size() * pairs.size() + pairs.size(); }
};

struct SketchQueryStats {
  std::size_t probes = 0;
};

namespace detail {

inline DemandVector sketch_vector(const DemandSketch& sk, const std::vector<int>& exps) {
  DemandVector d;
  for (std::size_t p = 0; p < exps.size(); ++p) {
    if (exps[p] == kZeroExponent) continue;
    d.set(sk.terminals[sk.pairs[p].first], sk.terminals[sk.pairs[p].second], sk.value_of(exps[p]));
  }
  return d;
}

}  // namespace detail

/// Builds the sketch. 0 < eps < 1/2 so that eps' = eps/4 < 1/8. Throws
/// BudgetExceeded when the candidate grid is larger than `budget`.
inline DemandSketch build_sketch(const TerminalNetwork& net, double epsilon, std::uint64_t budget = enumeration_budget(),
                                 std::size_t jobs = 1) {
  if (!(epsilon > 0 && epsilon < 0.5)) throw InputError("sketch epsilon must lie in (0, 1/2)");
  if (net.num_terminals() < 2) throw InputError("sketch needs at least two terminals");
  DemandSketch sk;
  sk.epsilon = epsilon;
  sk.epsilon_internal = epsilon / 4;
  sk.terminals = net.terminal_ids();
  for (std::size_t i = 0; i < sk.k(); ++i)
    for (std::size_t j = i + 1; j < sk.k(); ++j) sk.pairs.emplace_back(i, j);
  const std::size_t C = sk.pairs.size();
  for (auto [i, j] : sk.pairs) sk.L.push_back(max_flow(net, net.terminals()[i], net.terminals()[j]));

  // Per coordinate: [zero, jmin, ..., jmax].
  std::vector<std::vector<int>> grid(C);
  long double space = 1;
  for (std::size_t p = 0; p < C; ++p) {
    grid[p].push_back(kZeroExponent);
    if (sk.L[p] > 0) {
      auto [lo, hi] = sk.exponent_range(p);
      for (int e = lo; e <= hi; ++e) grid[p].push_back(e);
    }
    space *= static_cast<long double>(grid[p].size());
  }
  if (space > static_cast<long double>(budget))
    throw BudgetExceeded("sketch candidate space has " + std::to_string(static_cast<double>(space)) +
                         " vectors, over the budget of " + std::to_string(budget) + " (set FLOWSPARSE_BUDGET)");
  sk.candidate_space = static_cast<std::uint64_t>(space);

  std::mutex mu;
  std::atomic<std::uint64_t> calls{0};
  auto feasible = [&](const std::vector<int>& exps) {
    bool any = false;
    for (int e : exps) any |= e != kZeroExponent;
    if (!any) return true;
    ++calls;
    return lambda_value(net, detail::sketch_vector(sk, exps)) >= 1.0 - 1e-9;
  };

  // Depth-first over coordinates. For each prefix (later coordinates zero),
  // binary-search the largest feasible value of the next coordinate; every
  // smaller value is feasible by down-monotonicity and every larger one is
  // infeasible, and so is every completion of it.
  std::function<void(std::vector<int>&, std::size_t, std::vector<std::vector<int>>&)> expand =
      [&](std::vector<int>& cur, std::size_t p, std::vector<std::vector<int>>& out) {
        const auto& g = grid[p];
        std::size_t lo = 0, hi = g.size() - 1;  // g[lo] known feasible
        while (lo < hi) {
          std::size_t mid = (lo + hi + 1) / 2;
          cur[p] = g[mid];
          if (feasible(cur))
            lo = mid;
          else
            hi = mid - 1;
        }
        for (std::size_t i = 0; i <= lo; ++i) {
          cur[p] = g[i];
          if (p + 1 == C) {
            bool any = false;
            for (int e : cur) any |= e != kZeroExponent;
            if (any) out.push_back(cur);
          } else {
            expand(cur, p + 1, out);
          }
        }
        cur[p] = kZeroExponent;
      };

  // Parallelize over the feasible values of the first coordinate.
  std::vector<int> root(C, kZeroExponent);
  std::size_t first_max = 0;
  {
    std::size_t lo = 0, hi = grid[0].size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi + 1) / 2;
      root[0] = grid[0][mid];
      if (feasible(root))
        lo = mid;
      else
        hi = mid - 1;
    }
    first_max = lo;
    root[0] = kZeroExponent;
  }
  parallel_for(first_max + 1, jobs, [&](std::size_t i) {
    std::vector<int> cur(C, kZeroExponent);
    cur[0] = grid[0][i];
    std::vector<std::vector<int>> found;
    if (C == 1) {
      if (i > 0) found.push_back(cur);
    } else {
      expand(cur, 1, found);
    }
    std::lock_guard lock(mu);
    for (auto& v : found) sk.dict.insert(std::move(v));
  });
  sk.oracle_calls = calls.load();
  return sk;
}

/// Exponent e with (1+eps')^e <= x, the largest such up to rounding.
inline int round_down_exponent(const DemandSketch& sk, double x) {
  return static_cast<int>(std::floor(std::log(x) / std::log(sk.ratio()) - 1e-12));
}

/// Approximate decision "lambda <= lambda_G(d)" via one dictionary probe.
inline bool sketch_decide(const DemandSketch& sk, const std::vector<double>& coords, double lambda_probe) {
  const double kk = static_cast<double>(sk.k() * sk.k());
  std::vector<int> key(coords.size(), kZeroExponent);
  for (std::size_t p = 0; p < coords.size(); ++p) {
    double x = lambda_probe * coords[p];
    if (x <= 2 * sk.epsilon_internal / kk * to_double(sk.L[p])) continue;
    key[p] = round_down_exponent(sk, x);
  }
  return sk.dict.count(key) > 0;
}

/// Estimate of lambda_G(d) within a factor 1+eps either way.
inline double sketch_query(const DemandSketch& sk, const DemandVector& d, SketchQueryStats* stats = nullptr) {
  if (d.is_zero()) throw InputError("query of the zero demand");
  std::vector<double> coords(sk.pairs.size(), 0.0);
  std::map<VertexId, std::size_t> pos;
  for (std::size_t i = 0; i < sk.terminals.size(); ++i) pos[sk.terminals[i]] = i;
  for (const auto& [key, value] : d.entries()) {
    auto a = pos.find(key.first), b = pos.find(key.second);
    if (a == pos.end() || b == pos.end()) throw InputError("demand references a terminal unknown to the sketch");
    auto [i, j] = std::minmax(a->second, b->second);
    for (std::size_t p = 0; p < sk.pairs.size(); ++p)
      if (sk.pairs[p] == std::make_pair(i, j)) coords[p] = value;
  }
  double beta = kInfinity;
  for (std::size_t p = 0; p < coords.size(); ++p)
    if (coords[p] > 0) beta = std::min(beta, to_double(sk.L[p]) / coords[p]);
  if (beta == 0) return 0;
  const double kk = static_cast<double>(sk.k() * sk.k());
  // Probes beta/k^2 * (1+eps')^i for i = 0..imax, the last one >= beta.
  const int imax = static_cast<int>(std::ceil(std::log(kk) / std::log(sk.ratio())));
  auto probe = [&](int i) { return beta / kk * std::pow(sk.ratio(), i); };
  SketchQueryStats local;
  int lo = 0, hi = imax;
  ++local.probes;
  if (!sketch_decide(sk, coords, probe(0))) {
    if (stats) *stats = local;
    return probe(0);
  }
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    ++local.probes;
    if (sketch_decide(sk, coords, probe(mid)))
      lo = mid;
    else
      hi = mid - 1;
  }
  if (stats) *stats = local;
  return probe(lo);
}

}  // namespace flowsparse
