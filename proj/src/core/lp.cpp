// SPDX-License-Identifier: Apache-2.0

#include "core/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdrc {

namespace {

constexpr double kPivotTol = 1e-11;

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace

LpProblem LpProblem::sum_rate(int num_vars) {
  LpProblem p;
  p.num_vars = num_vars;
  p.objective.assign(static_cast<std::size_t>(num_vars), 1.0);
  return p;
}

LpSolution solve_lp(const LpProblem& p) {
  const int n = p.num_vars;
  const int m = static_cast<int>(p.rows.size());
  require(n >= 1, ErrorCode::InvalidArgument, "solve_lp: no variables");
  require(static_cast<int>(p.objective.size()) == n, ErrorCode::InvalidArgument,
          "solve_lp: objective length mismatch");
  for (const LpRow& row : p.rows) {
    require(std::isfinite(row.cap) && row.cap >= 0.0, ErrorCode::InvalidArgument,
            "solve_lp: caps must be finite and nonnegative");
    require(!row.coeffs.empty(), ErrorCode::InvalidArgument,
            "solve_lp: empty constraint row");
    for (auto [j, w] : row.coeffs) {
      require(j >= 0 && j < n, ErrorCode::InvalidArgument, "solve_lp: bad var index");
      require(std::isfinite(w), ErrorCode::InvalidArgument, "solve_lp: bad coefficient");
    }
  }

  // Tableau over n structural + m slack columns, plus the RHS.
  const int cols = n + m;
  std::vector<std::vector<double>> t(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(cols + 1), 0.0));
  for (int i = 0; i < m; ++i) {
    for (auto [j, w] : p.rows[static_cast<std::size_t>(i)].coeffs)
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += w;
    t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = 1.0;
    t[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols)] =
        p.rows[static_cast<std::size_t>(i)].cap;
  }
  std::vector<double> reduced(static_cast<std::size_t>(cols), 0.0);
  for (int j = 0; j < n; ++j) reduced[static_cast<std::size_t>(j)] = p.objective[static_cast<std::size_t>(j)];
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const long max_pivots = 200000L + 50L * static_cast<long>(m + n) * (m + n);
  for (long iter = 0;; ++iter) {
    require(iter < max_pivots, ErrorCode::Internal, "solve_lp: pivot budget exhausted");

    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (reduced[static_cast<std::size_t>(j)] > kPivotTol) {
        enter = j;  // Bland: lowest index
        break;
      }
    }
    if (enter < 0) break;  // optimal

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double a = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (a <= kPivotTol) continue;
      double ratio = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols)] / a;
      if (ratio < best_ratio - 1e-15 ||
          (std::fabs(ratio - best_ratio) <= 1e-15 &&
           (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw Error(ErrorCode::Unbounded, "solve_lp: unbounded objective");

    // Pivot (leave, enter).
    auto& prow = t[static_cast<std::size_t>(leave)];
    double piv = prow[static_cast<std::size_t>(enter)];
    for (double& v : prow) v /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      double f = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (f == 0.0) continue;
      auto& row = t[static_cast<std::size_t>(i)];
      for (int j = 0; j <= cols; ++j) row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
    }
    double f = reduced[static_cast<std::size_t>(enter)];
    for (int j = 0; j < cols; ++j) reduced[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  LpSolution out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    int b = basis[static_cast<std::size_t>(i)];
    if (b < n)
      out.x[static_cast<std::size_t>(b)] =
          std::max(0.0, t[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols)]);
  }
  for (int j = 0; j < n; ++j)
    out.objective += p.objective[static_cast<std::size_t>(j)] * out.x[static_cast<std::size_t>(j)];
  out.duals.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    out.duals[static_cast<std::size_t>(i)] = std::max(0.0, -reduced[static_cast<std::size_t>(n + i)]);
  for (int i = 0; i < m; ++i) {
    double slack = p.rows[static_cast<std::size_t>(i)].cap;
    for (auto [j, w] : p.rows[static_cast<std::size_t>(i)].coeffs)
      slack -= w * out.x[static_cast<std::size_t>(j)];
    if (slack <= 1e-9 * std::max(1.0, p.rows[static_cast<std::size_t>(i)].cap))
      out.binding_rows.push_back(i);
  }
  return out;
}

}  // namespace mdrc
