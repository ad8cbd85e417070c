#pragma once

// Two-phase tableau simplex over an arbitrary ordered field. With
// Scalar = Rational the solve is exact; with double it uses `eps` as the
// zero threshold. Dantzig pricing, falling back to Bland's rule after a run
// of degenerate pivots (Bland never cycles).

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace flowsparse::lp {

enum class RowSense { LessEqual, Equal, GreaterEqual };

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration limit";
  }
  return "?";
}

/// maximize c.x  subject to  rows,  x >= 0.
template <class Scalar>
struct DenseLp {
  struct Row {
    std::vector<Scalar> coeffs;
    RowSense sense = RowSense::LessEqual;
    Scalar rhs{};
  };

  explicit DenseLp(std::size_t num_vars = 0) : objective(num_vars, Scalar(0)) {}

  [[nodiscard]] std::size_t num_vars() const noexcept { return objective.size(); }

  Row& add_row(RowSense sense, Scalar rhs) {
    rows.push_back(Row{std::vector<Scalar>(num_vars(), Scalar(0)), sense, rhs});
    return rows.back();
  }

  std::vector<Scalar> objective;
  std::vector<Row> rows;
};

template <class Scalar>
struct DenseLpResult {
  LpStatus status = LpStatus::Infeasible;
  Scalar objective{};
  std::vector<Scalar> x;
  /// Shadow price per row for the maximization.
  std::vector<Scalar> duals;
  std::size_t iterations = 0;
};

namespace detail {

template <class Scalar>
bool positive(const Scalar& v, const Scalar& eps) { return v > eps; }

template <class Scalar>
bool nonzero(const Scalar& v, const Scalar& eps) { return v > eps || v < -eps; }

template <class Scalar>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m(rows), n(cols), a(rows, std::vector<Scalar>(cols + 1, Scalar(0))), basis(rows, 0) {}

  Scalar& rhs(std::size_t i) { return a[i][n]; }

  void pivot(std::size_t r, std::size_t c) {
    Scalar p = a[r][c];
    for (auto& v : a[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c] == Scalar(0)) continue;
      Scalar f = a[i][c];
      for (std::size_t j = 0; j <= n; ++j)
        if (a[r][j] != Scalar(0)) a[i][j] -= f * a[r][j];
    }
    basis[r] = c;
  }

  // Reduced costs of a maximization objective cost (size n) under the current basis.
  std::vector<Scalar> reduced_costs(const std::vector<Scalar>& cost) const {
    std::vector<Scalar> d(cost);
    for (std::size_t i = 0; i < m; ++i) {
      const Scalar& cb = cost[basis[i]];
      if (cb == Scalar(0)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (a[i][j] != Scalar(0)) d[j] -= cb * a[i][j];
    }
    return d;
  }

  // Runs primal simplex for `cost` over columns allowed[j]. Returns status.
  LpStatus optimize(const std::vector<Scalar>& cost, const std::vector<char>& allowed, const Scalar& eps,
                    std::size_t max_iter, std::size_t& iterations) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    for (;;) {
      if (iterations >= max_iter) return LpStatus::IterationLimit;
      auto d = reduced_costs(cost);
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (!allowed[j] || !positive(d[j], eps)) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (enter == n || d[j] > d[enter]) enter = j;
      }
      if (enter == n) return LpStatus::Optimal;
      std::size_t leave = m;
      Scalar best{};
      for (std::size_t i = 0; i < m; ++i) {
        if (!positive(a[i][enter], eps)) continue;
        Scalar ratio = a[i][n] / a[i][enter];
        if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) return LpStatus::Unbounded;
      if (!nonzero(best, eps)) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(leave, enter);
      ++iterations;
    }
  }

  std::size_t m, n;
  std::vector<std::vector<Scalar>> a;
  std::vector<std::size_t> basis;
};

}  // namespace detail

template <class Scalar>
DenseLpResult<Scalar> solve_dense(const DenseLp<Scalar>& lp, Scalar eps = Scalar(0), std::size_t max_iter = 100000) {
  const std::size_t nv = lp.num_vars();
  const std::size_t m = lp.rows.size();
  // Column layout: [structural | one unit column per row (slack or artificial) | surplus per >= row].
  std::size_t n_surplus = 0;
  for (const auto& r : lp.rows)
    if (r.sense == RowSense::GreaterEqual) ++n_surplus;
  const std::size_t unit0 = nv;
  const std::size_t surplus0 = nv + m;
  const std::size_t n = nv + m + n_surplus;

  detail::Tableau<Scalar> t(m, n);
  std::vector<char> artificial(n, 0);
  std::vector<Scalar> flip(m, Scalar(1));
  std::size_t s = surplus0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    if (row.coeffs.size() != nv) throw std::invalid_argument("row width does not match variable count");
    Scalar sign = row.rhs < Scalar(0) ? Scalar(-1) : Scalar(1);
    flip[i] = sign;
    for (std::size_t j = 0; j < nv; ++j) t.a[i][j] = sign * row.coeffs[j];
    t.rhs(i) = sign * row.rhs;
    RowSense sense = row.sense;
    if (sign < Scalar(0)) {
      if (sense == RowSense::LessEqual)
        sense = RowSense::GreaterEqual;
      else if (sense == RowSense::GreaterEqual)
        sense = RowSense::LessEqual;
    }
    t.a[i][unit0 + i] = Scalar(1);
    t.basis[i] = unit0 + i;
    if (row.sense == RowSense::GreaterEqual) {
      // surplus coefficient is -1 in the original orientation
      t.a[i][s++] = -sign;
    }
    if (sense != RowSense::LessEqual) artificial[unit0 + i] = 1;
  }

  DenseLpResult<Scalar> result;
  std::vector<char> allowed(n, 1);

  bool any_artificial = false;
  for (char c : artificial) any_artificial |= (c != 0);
  if (any_artificial) {
    std::vector<Scalar> phase1(n, Scalar(0));
    for (std::size_t j = 0; j < n; ++j)
      if (artificial[j]) phase1[j] = Scalar(-1);
    auto st = t.optimize(phase1, allowed, eps, max_iter, result.iterations);
    if (st == LpStatus::IterationLimit) {
      result.status = st;
      return result;
    }
    Scalar infeas(0);
    for (std::size_t i = 0; i < m; ++i)
      if (artificial[t.basis[i]]) infeas += t.rhs(i);
    if (detail::positive(infeas, eps)) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive remaining (zero-valued) artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!artificial[t.basis[i]]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!artificial[j] && detail::nonzero(t.a[i][j], eps)) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j)
      if (artificial[j]) allowed[j] = 0;
  }

  std::vector<Scalar> cost(n, Scalar(0));
  for (std::size_t j = 0; j < nv; ++j) cost[j] = lp.objective[j];
  result.status = t.optimize(cost, allowed, eps, max_iter, result.iterations);
  if (result.status != LpStatus::Optimal) return result;

  result.x.assign(nv, Scalar(0));
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis[i] < nv) result.x[t.basis[i]] = t.rhs(i);
  result.objective = Scalar(0);
  for (std::size_t j = 0; j < nv; ++j) result.objective += lp.objective[j] * result.x[j];
  // y_i = c_B . (column of B^-1 for row i) = c_B . tableau[:, unit0 + i], corrected for the row flip.
  result.duals.assign(m, Scalar(0));
  for (std::size_t r = 0; r < m; ++r) {
    Scalar y(0);
    for (std::size_t i = 0; i < m; ++i) y += cost[t.basis[i]] * t.a[i][unit0 + r];
    result.duals[r] = y * flip[r];
  }
  return result;
}

}  // namespace flowsparse::lp
