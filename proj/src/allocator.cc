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

#include "coalition_ledger/allocator.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "coalition_ledger/errors.h"

namespace coalition_ledger {

double GrandValue(const Game& game) {
  const std::optional<double> v = ValueOf(game, game.grand());
  if (!v) throw IncompleteTable("no value for the grand coalition");
  return *v;
}

LinearProgram BuildLeastCoreLp(const Game& fragment, double v_grand) {
  const int n = fragment.num_players();
  for (int i = 0; i < n; ++i) {
    if (!fragment.values().contains(Coalition::Singleton(PlayerId(i)))) {
      throw MissingSingleton("no value for singleton {" +
                             fragment.names()[i] + "}");
    }
  }
  LinearProgram lp;
  lp.num_vars = n + 1;
  lp.objective.assign(n + 1, 0.0);
  lp.objective[n] = 1.0;

  LinearConstraint efficiency;
  efficiency.coefficients.assign(n + 1, 1.0);
  efficiency.coefficients[n] = 0.0;
  efficiency.bound = v_grand;
  lp.equalities.push_back(std::move(efficiency));

  const Coalition grand = fragment.grand();
  lp.inequalities.reserve(fragment.values().size());
  // std::map iterates in ascending bitmask order.
  for (const auto& [s, v] : fragment.values()) {
    if (s == grand) continue;
    LinearConstraint row;
    row.coefficients.assign(n + 1, 0.0);
    for (int i : s.Members()) row.coefficients[i] = -1.0;
    row.coefficients[n] = -1.0;
    row.bound = -v;
    lp.inequalities.push_back(std::move(row));
  }
  return lp;
}

LeastCoreResult SolveLeastCore(const Game& fragment, double v_grand) {
  const LinearProgram lp = BuildLeastCoreLp(fragment, v_grand);
  if (lp.inequalities.empty()) {
    // A lone player is the grand coalition and has no deficit to trade off.
    LeastCoreResult result;
    result.allocation = {Method::kLeastCore, {v_grand}};
    return result;
  }
  const LpSolution solution = SolveLp(lp);
  if (solution.status != LpStatus::kOptimal) {
    throw SolverFailure("least-core LP reported " +
                        std::string(LpStatusName(solution.status)));
  }
  const int n = fragment.num_players();
  LeastCoreResult result;
  result.allocation.method = Method::kLeastCore;
  result.allocation.phi.assign(solution.x.begin(), solution.x.begin() + n);
  result.e_star = solution.x[n] + 0.0;  // no negative zero in reports

  const Coalition grand = fragment.grand();
  for (const auto& [s, v] : fragment.values()) {
    if (s == grand) continue;
    double payoff = 0;
    for (int i : s.Members()) payoff += result.allocation.phi[i];
    const double deficit = v - payoff;
    result.deficits.emplace(s, deficit);
    if (std::abs(deficit - result.e_star) <= kBindingTolerance) {
      result.binding.push_back(s);
    }
  }
  return result;
}

Allocation ShapleyExact(const Game& game) {
  const int n = game.num_players();
  if (n > kMaxShapleyPlayers) {
    throw TooManyPlayers("exact Shapley is limited to " +
                         std::to_string(kMaxShapleyPlayers) + " players, got " +
                         std::to_string(n));
  }
  if (!ValidateComplete(game)) {
    const std::vector<Coalition> missing = MissingCoalitions(game);
    std::string listing;
    for (size_t k = 0; k < missing.size() && k < 10; ++k) {
      listing += (k ? " {" : "{") + game.Key(missing[k]) + "}";
    }
    if (missing.size() > 10) listing += " ...";
    throw IncompleteTable("exact Shapley needs all 2^n - 1 values; missing " +
                          std::to_string(missing.size()) + ": " + listing);
  }
  const uint64_t size = uint64_t{1} << n;
  std::vector<double> v(size, 0.0);
  for (const auto& [s, value] : game.values()) v[s.bits()] = value;

  // weight[k] = k! (n - k - 1)! / n!
  std::vector<double> weight(n);
  weight[0] = 1.0 / n;
  for (int k = 0; k + 1 < n; ++k) {
    weight[k + 1] = weight[k] * (k + 1) / (n - k - 1);
  }

  Allocation allocation{Method::kShapley, std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) {
    const uint64_t bit = uint64_t{1} << i;
    double sum = 0;
    for (uint64_t s = 0; s < size; ++s) {
      if (s & bit) continue;
      sum += weight[std::popcount(s)] * (v[s | bit] - v[s]);
    }
    allocation.phi[i] = sum;
  }
  return allocation;
}

Allocation LeaveOneOut(const Game& game) {
  const int n = game.num_players();
  const double v_grand = GrandValue(game);
  std::vector<double> loss(n);
  double total = 0;
  for (int i = 0; i < n; ++i) {
    const Coalition rest = game.grand().Without(PlayerId(i));
    const std::optional<double> v = ValueOf(game, rest);
    if (!v) {
      throw IncompleteTable("leave-one-out needs a value for {" +
                            game.Key(rest) + "}");
    }
    loss[i] = std::max(0.0, v_grand - *v);
    total += loss[i];
  }
  Allocation allocation{Method::kLeaveOneOut, std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    allocation.phi[i] = total > 0 ? v_grand * loss[i] / total : v_grand / n;
  }
  return allocation;
}

Allocation Proportional(const Game& game) {
  if (!game.weights()) {
    throw MissingWeights("proportional allocation needs per-player weights");
  }
  const std::vector<double>& w = *game.weights();
  double total = 0;
  for (double x : w) total += x;
  if (!(total > 0)) throw DegenerateWeights("weights sum to zero");
  const double v_grand = GrandValue(game);
  Allocation allocation{Method::kProportional, std::vector<double>(w.size())};
  for (size_t i = 0; i < w.size(); ++i) {
    allocation.phi[i] = v_grand * w[i] / total;
  }
  return allocation;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0, norm_a = 0, norm_b = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0 && norm_b == 0) return 1.0;
  if (norm_a == 0 || norm_b == 0) return 0.0;
  if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 1.0;
  return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

double MaxAbsDifference(std::span<const double> a, std::span<const double> b) {
  double diff = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff;
}

AllocationReport Compare(std::span<const Allocation> allocations) {
  AllocationReport report;
  report.allocations.assign(allocations.begin(), allocations.end());
  std::stable_sort(report.allocations.begin(), report.allocations.end(),
                   [](const Allocation& a, const Allocation& b) {
                     return a.method < b.method;
                   });
  if (report.allocations.empty()) return report;

  const size_t n = report.allocations.front().phi.size();
  auto total = [](const Allocation& a) {
    double sum = 0;
    for (double x : a.phi) sum += x;
    return sum;
  };
  report.v_grand = total(report.allocations.front());
  for (const Allocation& a : report.allocations) {
    if (a.phi.size() != n) {
      throw MismatchedGames("allocations have different player counts");
    }
    if (std::abs(total(a) - report.v_grand) >
        1e-6 * std::max(1.0, std::abs(report.v_grand))) {
      throw MismatchedGames("allocations distribute different totals");
    }
  }
  for (size_t i = 0; i < report.allocations.size(); ++i) {
    for (size_t j = i + 1; j < report.allocations.size(); ++j) {
      const Allocation& a = report.allocations[i];
      const Allocation& b = report.allocations[j];
      report.comparisons.push_back({a.method, b.method,
                                    CosineSimilarity(a.phi, b.phi),
                                    MaxAbsDifference(a.phi, b.phi)});
    }
  }
  return report;
}

}  // namespace coalition_ledger
