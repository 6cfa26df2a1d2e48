// SPDX-License-Identifier: Apache-2.0
//
// Small dense linear programs: maximize a linear objective over
// nonnegative variables under upper-bound rows with nonnegative caps.
// The origin is always feasible, so a slack basis starts the simplex.

#pragma once

#include <utility>
#include <vector>

#include "core/linalg.hpp"

namespace mdrc {

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // sparse (variable, weight)
  double cap = 0.0;                            // cap >= 0
};

struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;  // length num_vars
  std::vector<LpRow> rows;

  static LpProblem sum_rate(int num_vars);  // all-ones objective
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> duals;        // one per row, >= 0
  std::vector<int> binding_rows;    // rows with zero slack at the optimum
};

/// Dense primal simplex with Bland's rule (lowest index) for both the
/// entering and leaving choices, which rules out cycling on the
/// degenerate zero-cap rows these problems routinely contain.
/// Throws Unbounded if no optimal vertex exists.
LpSolution solve_lp(const LpProblem& p);

}  // namespace mdrc
