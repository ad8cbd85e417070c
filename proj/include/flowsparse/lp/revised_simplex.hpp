#pragma once

// Revised primal simplex with an explicit dense basis inverse, built for
// column generation:
//
//   maximize c.x  subject to  A x <= b,  x >= 0,  b >= 0.
//
// The all-slack basis is feasible, so no phase one is needed. Rows and
// columns can be appended between solves. A new row must not touch any
// existing column (columns only reference rows that exist when they are
// added), which keeps the current basis feasible and lets the inverse grow by
// a unit block.

#include "flowsparse/lp/dense_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace flowsparse::lp {

using SparseColumn = std::vector<std::pair<std::size_t, double>>;

class RevisedSimplex {
 public:
  struct Options {
    double reduced_cost_tol = 1e-10;
    double pivot_tol = 1e-11;
    std::size_t max_iterations = 2'000'000;
    std::size_t degenerate_switch = 40;
  };

  RevisedSimplex() = default;
  explicit RevisedSimplex(Options options) : opt_(options) {}

  std::size_t add_row(double rhs) {
    if (rhs < 0) throw std::invalid_argument("revised simplex requires nonnegative right-hand sides");
    const std::size_t r = rhs_.size();
    rhs_.push_back(rhs);
    for (auto& row : binv_) row.push_back(0.0);
    binv_.emplace_back(r + 1, 0.0);
    binv_[r][r] = 1.0;
    basis_.push_back(slack(r));
    xb_.push_back(rhs);
    return r;
  }

  std::size_t add_column(double cost, SparseColumn entries) {
    for (const auto& [r, v] : entries)
      if (r >= rhs_.size()) throw std::invalid_argument("column references a row that does not exist");
    cols_.push_back({cost, std::move(entries)});
    in_basis_.push_back(0);
    return cols_.size() - 1;
  }

  LpStatus solve() {
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::size_t since_refactor = 0;
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::IterationLimit;
      if (since_refactor > std::max<std::size_t>(200, 2 * rhs_.size())) {
        refactor();
        since_refactor = 0;
      }
      compute_duals();
      // Pricing: structural columns, then slacks.
      long enter = 0;
      bool found = false;
      double best = opt_.reduced_cost_tol;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (in_basis_[j]) continue;
        double d = cols_[j].cost;
        for (const auto& [r, v] : cols_[j].entries) d -= y_[r] * v;
        if (d > best) {
          enter = static_cast<long>(j);
          found = true;
          if (bland) break;
          best = d;
        }
      }
      if (!found || !bland) {
        for (std::size_t r = 0; r < rhs_.size(); ++r) {
          if (is_slack_basic(r)) continue;
          double d = -y_[r];
          if (d > best) {
            enter = slack(r);
            found = true;
            if (bland) break;
            best = d;
          }
        }
      }
      if (!found) return LpStatus::Optimal;

      auto w = ftran(enter);
      std::size_t leave = rhs_.size();
      double theta = 0;
      for (std::size_t i = 0; i < rhs_.size(); ++i) {
        if (w[i] <= opt_.pivot_tol) continue;
        double ratio = std::max(0.0, xb_[i]) / w[i];
        bool take = leave == rhs_.size() || ratio < theta - 1e-15;
        if (!take && std::abs(ratio - theta) <= 1e-15) {
          take = bland ? order_key(basis_[i]) < order_key(basis_[leave]) : w[i] > w[leave];
        }
        if (take) {
          leave = i;
          theta = ratio;
        }
      }
      if (leave == rhs_.size()) return LpStatus::Unbounded;
      if (theta <= 1e-14) {
        if (++degenerate_run > opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(leave, enter, w, theta);
      ++iterations_;
      ++since_refactor;
    }
  }

  [[nodiscard]] std::size_t num_rows() const noexcept { return rhs_.size(); }
  [[nodiscard]] std::size_t num_columns() const noexcept { return cols_.size(); }
  [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

  [[nodiscard]] double objective() const {
    double z = 0;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] >= 0) z += cols_[basis_[i]].cost * xb_[i];
    return z;
  }

  [[nodiscard]] std::vector<double> primal() const {
    std::vector<double> x(cols_.size(), 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] >= 0) x[basis_[i]] = std::max(0.0, xb_[i]);
    return x;
  }

  /// Row duals of the last solve (recomputed from the final basis).
  [[nodiscard]] std::vector<double> duals() {
    compute_duals();
    return y_;
  }

 private:
  struct Column {
    double cost;
    SparseColumn entries;
  };

  static long slack(std::size_t r) { return -static_cast<long>(r) - 1; }
  bool is_slack_basic(std::size_t r) const {
    // Slack r is basic iff some basis entry equals slack(r); tracked lazily.
    return slack_basic_row(r);
  }
  bool slack_basic_row(std::size_t r) const {
    if (slack_pos_.size() != rhs_.size()) rebuild_slack_pos();
    return slack_pos_[r] >= 0;
  }
  void rebuild_slack_pos() const {
    slack_pos_.assign(rhs_.size(), -1);
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] < 0) slack_pos_[static_cast<std::size_t>(-basis_[i] - 1)] = static_cast<long>(i);
  }

  // Common index order over structural columns and slacks for Bland's rule.
  std::size_t order_key(long var) const {
    return var >= 0 ? static_cast<std::size_t>(var) : cols_.size() + static_cast<std::size_t>(-var - 1);
  }

  double cost_of(long var) const { return var >= 0 ? cols_[var].cost : 0.0; }

  void compute_duals() {
    const std::size_t m = rhs_.size();
    y_.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double cb = cost_of(basis_[i]);
      if (cb == 0.0) continue;
      const auto& row = binv_[i];
      for (std::size_t j = 0; j < m; ++j) y_[j] += cb * row[j];
    }
  }

  std::vector<double> ftran(long var) const {
    const std::size_t m = rhs_.size();
    std::vector<double> w(m, 0.0);
    if (var < 0) {
      std::size_t r = static_cast<std::size_t>(-var - 1);
      for (std::size_t i = 0; i < m; ++i) w[i] = binv_[i][r];
    } else {
      for (const auto& [r, v] : cols_[var].entries)
        for (std::size_t i = 0; i < m; ++i) w[i] += binv_[i][r] * v;
    }
    return w;
  }

  void pivot(std::size_t leave, long enter, const std::vector<double>& w, double theta) {
    const std::size_t m = rhs_.size();
    for (std::size_t i = 0; i < m; ++i) xb_[i] -= theta * w[i];
    xb_[leave] = theta;
    const double p = w[leave];
    auto& prow = binv_[leave];
    for (auto& v : prow) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || w[i] == 0.0) continue;
      const double f = w[i];
      auto& row = binv_[i];
      for (std::size_t j = 0; j < m; ++j) row[j] -= f * prow[j];
    }
    long out = basis_[leave];
    if (out >= 0) in_basis_[out] = 0;
    if (enter >= 0) in_basis_[enter] = 1;
    basis_[leave] = enter;
    slack_pos_.clear();
  }

  // Recomputes the basis inverse by Gauss-Jordan elimination with partial
  // pivoting, then x_B = B^-1 b.
  void refactor() {
    const std::size_t m = rhs_.size();
    std::vector<std::vector<double>> b(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      long var = basis_[i];
      if (var < 0) {
        b[static_cast<std::size_t>(-var - 1)][i] = 1.0;
      } else {
        for (const auto& [r, v] : cols_[var].entries) b[r][i] += v;
      }
    }
    std::vector<std::vector<double>> inv(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::abs(b[r][c]) > std::abs(b[piv][c])) piv = r;
      if (std::abs(b[piv][c]) < 1e-14) return;  // keep the updated inverse
      std::swap(b[piv], b[c]);
      std::swap(inv[piv], inv[c]);
      const double p = b[c][c];
      for (auto& v : b[c]) v /= p;
      for (auto& v : inv[c]) v /= p;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == c || b[r][c] == 0.0) continue;
        const double f = b[r][c];
        for (std::size_t j = c; j < m; ++j) b[r][j] -= f * b[c][j];
        for (std::size_t j = 0; j < m; ++j) inv[r][j] -= f * inv[c][j];
      }
    }
    binv_ = std::move(inv);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < m; ++j) s += binv_[i][j] * rhs_[j];
      xb_[i] = s;
    }
  }

  Options opt_{};
  std::vector<double> rhs_;
  std::vector<Column> cols_;
  std::vector<char> in_basis_;
  std::vector<long> basis_;  // >= 0 structural column, < 0 slack -(row+1)
  std::vector<double> xb_;
  std::vector<std::vector<double>> binv_;
  std::vector<double> y_;
  mutable std::vector<long> slack_pos_;
  std::size_t iterations_ = 0;
};

}  // namespace flowsparse::lp
