// Copyright 2026 The Coalition Ledger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COALITION_LEDGER_LP_SOLVER_H_
#define COALITION_LEDGER_LP_SOLVER_H_

#include <string_view>
#include <vector>

namespace coalition_ledger {

struct LinearConstraint {
  std::vector<double> coefficients;
  double bound = 0;
};

// minimize objective . x
// subject to  a . x <= b  for every row in `inequalities`
//             e . x == f  for every row in `equalities`
// with every variable free in sign.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LinearConstraint> inequalities;
  std::vector<LinearConstraint> equalities;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view LpStatusName(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  // The remaining fields are set only when status == kOptimal.
  std::vector<double> x;
  double objective_value = 0;
  // Optimality certificate in the original row units:
  //   objective + A^T inequality_duals + E^T equality_duals = 0,
  //   inequality_duals >= 0,
  //   objective_value = -(b . inequality_duals + f . equality_duals).
  std::vector<double> inequality_duals;
  std::vector<double> equality_duals;
};

// Dense two-phase simplex. Rows are scaled to unit max-norm, and an optimal
// answer is returned only after the basic point passes a 1e-9 residual check
// on the scaled rows and its multipliers are dual feasible; otherwise
// NumericalBreakdown is thrown. Deterministic for a given input, row order
// included. Throws BadSpec for malformed programs.
LpSolution SolveLp(const LinearProgram& lp);

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_LP_SOLVER_H_
