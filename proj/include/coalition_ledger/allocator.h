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

#ifndef COALITION_LEDGER_ALLOCATOR_H_
#define COALITION_LEDGER_ALLOCATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "coalition_ledger/game.h"
#include "coalition_ledger/lp_solver.h"

namespace coalition_ledger {

inline constexpr double kBindingTolerance = 1e-6;
inline constexpr int kMaxShapleyPlayers = 24;

struct LeastCoreResult {
  Allocation allocation;
  // Optimal maximum deficit. Negative when every constrained coalition is
  // strictly better off inside the grand coalition.
  double e_star = 0;
  // v(S) - sum of phi over S, for exactly the constrained coalitions.
  std::map<Coalition, double> deficits;
  // Coalitions whose deficit is within kBindingTolerance of e_star.
  std::vector<Coalition> binding;
};

// Variables (phi_0, ..., phi_{n-1}, e); minimize e subject to
//   sum_i phi_i = v_grand
//   -sum_{i in S} phi_i - e <= -v(S)   for every S in the fragment
// with rows in ascending bitmask order. Entries for the grand coalition are
// skipped since efficiency already pins its deficit to zero. Throws
// MissingSingleton unless every singleton is present.
LinearProgram BuildLeastCoreLp(const Game& fragment, double v_grand);

// With a single player e_star is 0 and phi = (v_grand). Throws SolverFailure
// if the LP is not optimal; that cannot happen for a fragment holding every
// singleton.
LeastCoreResult SolveLeastCore(const Game& fragment, double v_grand);

// Exact Shapley value over all 2^n coalitions. Throws IncompleteTable or
// TooManyPlayers (n > 24).
Allocation ShapleyExact(const Game& game);

// phi_i = v(D) * m_i / sum_j m_j with m_i = max(0, v(D) - v(D \ {i})); equal
// split when every m_i is zero. Throws IncompleteTable.
Allocation LeaveOneOut(const Game& game);

// phi_i = v(D) * w_i / sum_j w_j. Throws MissingWeights, DegenerateWeights
// or IncompleteTable (no grand-coalition value).
Allocation Proportional(const Game& game);

struct PairwiseComparison {
  Method first;
  Method second;
  double cosine = 0;
  double max_abs_diff = 0;
};

struct AllocationReport {
  std::vector<std::string> players;
  double v_grand = 0;
  std::vector<Allocation> allocations;  // sorted by method
  std::vector<PairwiseComparison> comparisons;
  std::optional<LeastCoreResult> least_core;
  int64_t evaluated_count = 0;
};

double CosineSimilarity(std::span<const double> a, std::span<const double> b);
double MaxAbsDifference(std::span<const double> a, std::span<const double> b);

// Pairwise metrics over allocations that share n and v(D) (within 1e-6).
// Rows are ordered by method tag. Throws MismatchedGames.
AllocationReport Compare(std::span<const Allocation> allocations);

// The grand-coalition value, or IncompleteTable when absent.
double GrandValue(const Game& game);

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_ALLOCATOR_H_
