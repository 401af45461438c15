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

#include "coalition_ledger/lp_solver.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "coalition_ledger/errors.h"

namespace coalition_ledger {
namespace {

constexpr double kPivotTol = 1e-9;     // reduced-cost and pivot-element floor
constexpr double kResidualTol = 1e-9;  // on rows scaled to unit max-norm
constexpr double kDualTol = 1e-7;      // relative to max(1, |objective|_inf)
constexpr int kDegenerateStreakForBland = 50;
constexpr int kArtificialId = -1;

// One `a . x <= b` row after scaling; equalities contribute two rows.
struct ScaledRow {
  std::vector<double> a;
  double b = 0;
  double scale = 1;   // original = scaled * scale
  bool from_equality = false;
  int source = 0;     // index into inequalities or equalities
  double sign = 1;    // -1 for the negated half of an equality
};

// Dictionary-form tableau over the split variables x = x_plus - x_minus.
// Every row r reads: basic_r = T[r][rhs] - sum_j T[r][j] * nonbasic_j, and
// the two objective rows follow the same convention, so a negative entry in
// an objective row marks an improving column.
class Tableau {
 public:
  Tableau(const std::vector<ScaledRow>& rows, const std::vector<double>& cost,
          int num_vars)
      : m_(static_cast<int>(rows.size())),
        k_(2 * num_vars),
        width_(k_ + 2),
        cells_(static_cast<size_t>(m_ + 2) * width_, 0.0),
        basis_(m_),
        nonbasic_(k_ + 1) {
    for (int r = 0; r < m_; ++r) {
      for (int j = 0; j < num_vars; ++j) {
        at(r, j) = rows[r].a[j];
        at(r, num_vars + j) = -rows[r].a[j];
      }
      at(r, k_) = -1.0;  // artificial column, used by phase one only
      at(r, rhs()) = rows[r].b;
      basis_[r] = k_ + r;
    }
    for (int j = 0; j < num_vars; ++j) {
      // Maximizing -cost . x; stored negated.
      at(m_, j) = cost[j];
      at(m_, num_vars + j) = -cost[j];
    }
    for (int j = 0; j < k_; ++j) nonbasic_[j] = j;
    nonbasic_[k_] = kArtificialId;
    at(m_ + 1, k_) = 1.0;
  }

  enum class Outcome { kOptimal, kUnbounded };

  // Returns false when the constraints admit no point.
  bool PhaseOne() {
    int worst = -1;
    for (int r = 0; r < m_; ++r) {
      if (at(r, rhs()) < 0 && (worst < 0 || at(r, rhs()) < at(worst, rhs()))) {
        worst = r;
      }
    }
    if (worst < 0) return true;
    Pivot(worst, k_);
    Run(m_ + 1, /*allow_artificial=*/true);
    if (at(m_ + 1, rhs()) < -kResidualTol) return false;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] != kArtificialId) continue;
      int best = -1;
      for (int j = 0; j <= k_; ++j) {
        if (nonbasic_[j] == kArtificialId) continue;
        if (std::abs(at(r, j)) > kPivotTol &&
            (best < 0 || std::abs(at(r, j)) > std::abs(at(r, best)))) {
          best = j;
        }
      }
      // A redundant row keeps the artificial basic at level zero.
      if (best >= 0) Pivot(r, best);
    }
    return true;
  }

  Outcome PhaseTwo() { return Run(m_, /*allow_artificial=*/false); }

  int rows() const { return m_; }
  int columns() const { return k_ + 1; }
  int rhs() const { return k_ + 1; }
  int basic_id(int r) const { return basis_[r]; }
  int nonbasic_id(int j) const { return nonbasic_[j]; }
  double value(int r) const { return at(r, rhs()); }
  double reduced_cost(int j) const { return at(m_, j); }

 private:
  double& at(int r, int c) { return cells_[static_cast<size_t>(r) * width_ + c]; }
  double at(int r, int c) const {
    return cells_[static_cast<size_t>(r) * width_ + c];
  }

  // Dantzig pricing, falling back to Bland's rule on long degenerate runs;
  // ties always resolve to the smaller variable id.
  Outcome Run(int objective_row, bool allow_artificial) {
    const long long max_pivots = 100LL * (m_ + k_) + 10000;
    int degenerate_streak = 0;
    for (long long iteration = 0;; ++iteration) {
      if (iteration > max_pivots) {
        throw NumericalBreakdown("simplex exceeded " +
                                 std::to_string(max_pivots) + " pivots");
      }
      const bool bland = degenerate_streak >= kDegenerateStreakForBland;
      int enter = -1;
      for (int j = 0; j <= k_; ++j) {
        if (!allow_artificial && nonbasic_[j] == kArtificialId) continue;
        const double d = at(objective_row, j);
        if (d >= -kPivotTol) continue;
        if (enter < 0) {
          enter = j;
          continue;
        }
        const double best = at(objective_row, enter);
        if (bland) {
          if (nonbasic_[j] < nonbasic_[enter]) enter = j;
        } else if (d < best || (d == best && nonbasic_[j] < nonbasic_[enter])) {
          enter = j;
        }
      }
      if (enter < 0) return Outcome::kOptimal;

      int leave = -1;
      double best_ratio = 0;
      for (int r = 0; r < m_; ++r) {
        const double coef = at(r, enter);
        if (coef <= kPivotTol) continue;
        const double ratio = std::max(at(r, rhs()), 0.0) / coef;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return Outcome::kUnbounded;
      degenerate_streak = best_ratio <= kPivotTol ? degenerate_streak + 1 : 0;
      Pivot(leave, enter);
    }
  }

  void Pivot(int r, int s) {
    const double inv = 1.0 / at(r, s);
    double* pivot_row = &cells_[static_cast<size_t>(r) * width_];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* row = &cells_[static_cast<size_t>(i) * width_];
      const double factor = row[s] * inv;
      if (factor == 0.0) continue;
      for (int j = 0; j < width_; ++j) row[j] -= pivot_row[j] * factor;
      row[s] = -factor;
    }
    for (int j = 0; j < width_; ++j) pivot_row[j] *= inv;
    pivot_row[s] = inv;
    std::swap(basis_[r], nonbasic_[s]);
  }

  int m_;
  int k_;
  int width_;
  std::vector<double> cells_;
  std::vector<int> basis_;
  std::vector<int> nonbasic_;
};

// Solves the square system in place with partial pivoting; nullopt when the
// matrix is numerically singular.
std::optional<std::vector<double>> SolveSquare(std::vector<double> a,
                                               std::vector<double> b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (std::abs(a[pivot * n + col]) < 1e-12) return std::nullopt;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double sum = b[r];
    for (int j = r + 1; j < n; ++j) sum -= a[r * n + j] * x[j];
    x[r] = sum / a[r * n + r];
  }
  return x;
}

struct Candidate {
  std::vector<double> x;
  std::vector<double> row_duals;  // per scaled row, >= 0
};

// Recomputes the vertex and its multipliers from the defining equations of
// the final basis instead of reading the (drifted) tableau.
std::optional<Candidate> PolishFromBasis(const Tableau& t,
                                         const std::vector<ScaledRow>& rows,
                                         const std::vector<double>& cost,
                                         int n) {
  const int k = 2 * n;
  std::vector<bool> structural_nonbasic(k, false);
  std::vector<int> active_rows;
  for (int j = 0; j < t.columns(); ++j) {
    const int id = t.nonbasic_id(j);
    if (id == kArtificialId) continue;
    if (id < k) {
      structural_nonbasic[id] = true;
    } else {
      active_rows.push_back(id - k);
    }
  }
  std::vector<int> pinned_vars;
  for (int j = 0; j < n; ++j) {
    if (structural_nonbasic[j] && structural_nonbasic[n + j]) {
      pinned_vars.push_back(j);
    }
  }
  if (static_cast<int>(active_rows.size() + pinned_vars.size()) != n) {
    return std::nullopt;
  }
  std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> rhs(n, 0.0);
  int e = 0;
  for (int r : active_rows) {
    for (int j = 0; j < n; ++j) m[e * n + j] = rows[r].a[j];
    rhs[e++] = rows[r].b;
  }
  for (int j : pinned_vars) {
    m[e * n + j] = 1.0;
    rhs[e++] = 0.0;
  }
  std::optional<std::vector<double>> x = SolveSquare(m, rhs, n);
  if (!x) return std::nullopt;

  std::vector<double> mt(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mt[j * n + i] = m[i * n + j];
  }
  std::vector<double> neg_cost(n);
  for (int j = 0; j < n; ++j) neg_cost[j] = -cost[j];
  std::optional<std::vector<double>> w = SolveSquare(mt, neg_cost, n);
  if (!w) return std::nullopt;

  Candidate c;
  c.x = std::move(*x);
  c.row_duals.assign(rows.size(), 0.0);
  for (size_t i = 0; i < active_rows.size(); ++i) {
    c.row_duals[active_rows[i]] = (*w)[i];
  }
  const double scale = std::max(
      1.0, std::abs(*std::max_element(cost.begin(), cost.end(), [](double a,
                                                                   double b) {
        return std::abs(a) < std::abs(b);
      })));
  // Pinned variables must carry zero multipliers at a true optimum.
  for (size_t i = 0; i < pinned_vars.size(); ++i) {
    if (std::abs((*w)[active_rows.size() + i]) > kDualTol * scale) {
      return std::nullopt;
    }
  }
  return c;
}

Candidate ReadTableau(const Tableau& t, int n) {
  const int k = 2 * n;
  Candidate c;
  c.x.assign(n, 0.0);
  c.row_duals.assign(t.rows(), 0.0);
  for (int r = 0; r < t.rows(); ++r) {
    const int id = t.basic_id(r);
    if (id >= 0 && id < n) c.x[id] += t.value(r);
    if (id >= n && id < k) c.x[id - n] -= t.value(r);
  }
  for (int j = 0; j < t.columns(); ++j) {
    const int id = t.nonbasic_id(j);
    if (id >= k) c.row_duals[id - k] = t.reduced_cost(j);
  }
  return c;
}

bool Certifies(const Candidate& c, const std::vector<ScaledRow>& rows,
               const std::vector<double>& cost, int n) {
  double cost_scale = 1.0;
  for (double v : cost) cost_scale = std::max(cost_scale, std::abs(v));
  for (double v : c.x) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : c.row_duals) {
    if (!std::isfinite(v)) return false;
  }
  std::vector<double> stationarity = cost;
  for (size_t r = 0; r < rows.size(); ++r) {
    const ScaledRow& row = rows[r];
    double lhs = 0;
    for (int j = 0; j < n; ++j) lhs += row.a[j] * c.x[j];
    if (!(lhs - row.b <= kResidualTol)) return false;
    if (c.row_duals[r] < -kDualTol * cost_scale) return false;
    for (int j = 0; j < n; ++j) stationarity[j] += c.row_duals[r] * row.a[j];
  }
  for (double v : stationarity) {
    if (!(std::abs(v) <= kDualTol * cost_scale)) return false;
  }
  return true;
}

void CheckWellFormed(const LinearProgram& lp) {
  if (lp.num_vars < 1) throw BadSpec("linear program needs a variable");
  if (static_cast<int>(lp.objective.size()) != lp.num_vars) {
    throw BadSpec("objective length differs from num_vars");
  }
  auto check_row = [&](const LinearConstraint& row) {
    if (static_cast<int>(row.coefficients.size()) != lp.num_vars) {
      throw BadSpec("constraint row length differs from num_vars");
    }
    for (double v : row.coefficients) {
      if (!std::isfinite(v)) throw BadSpec("non-finite constraint coefficient");
    }
    if (!std::isfinite(row.bound)) throw BadSpec("non-finite constraint bound");
  };
  for (double v : lp.objective) {
    if (!std::isfinite(v)) throw BadSpec("non-finite objective coefficient");
  }
  for (const auto& row : lp.inequalities) check_row(row);
  for (const auto& row : lp.equalities) check_row(row);
}

}  // namespace

std::string_view LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "Optimal";
    case LpStatus::kInfeasible:
      return "Infeasible";
    case LpStatus::kUnbounded:
      return "Unbounded";
  }
  return "Unknown";
}

LpSolution SolveLp(const LinearProgram& lp) {
  CheckWellFormed(lp);
  const int n = lp.num_vars;

  std::vector<ScaledRow> rows;
  rows.reserve(lp.inequalities.size() + 2 * lp.equalities.size());
  bool trivially_infeasible = false;
  auto add_row = [&](const LinearConstraint& source, bool equality, int index,
                     double sign) {
    double scale = 0;
    for (double v : source.coefficients) scale = std::max(scale, std::abs(v));
    if (scale == 0) {
      // 0 <= sign * bound must hold on its own.
      if (sign * source.bound < -kResidualTol) trivially_infeasible = true;
      return;
    }
    ScaledRow row;
    row.a.resize(n);
    for (int j = 0; j < n; ++j) row.a[j] = sign * source.coefficients[j] / scale;
    row.b = sign * source.bound / scale;
    row.scale = scale;
    row.from_equality = equality;
    row.source = index;
    row.sign = sign;
    rows.push_back(std::move(row));
  };
  for (size_t i = 0; i < lp.inequalities.size(); ++i) {
    add_row(lp.inequalities[i], false, static_cast<int>(i), 1.0);
  }
  for (size_t i = 0; i < lp.equalities.size(); ++i) {
    add_row(lp.equalities[i], true, static_cast<int>(i), 1.0);
    add_row(lp.equalities[i], true, static_cast<int>(i), -1.0);
  }

  LpSolution solution;
  if (trivially_infeasible) {
    solution.status = LpStatus::kInfeasible;
    return solution;
  }

  Tableau tableau(rows, lp.objective, n);
  if (!tableau.PhaseOne()) {
    solution.status = LpStatus::kInfeasible;
    return solution;
  }
  if (tableau.PhaseTwo() == Tableau::Outcome::kUnbounded) {
    solution.status = LpStatus::kUnbounded;
    return solution;
  }

  std::optional<Candidate> accepted;
  if (std::optional<Candidate> polished =
          PolishFromBasis(tableau, rows, lp.objective, n);
      polished && Certifies(*polished, rows, lp.objective, n)) {
    accepted = std::move(polished);
  } else if (Candidate raw = ReadTableau(tableau, n);
             Certifies(raw, rows, lp.objective, n)) {
    accepted = std::move(raw);
  }
  if (!accepted) {
    throw NumericalBreakdown(
        "simplex stopped at a basis that fails the optimality certificate");
  }

  solution.status = LpStatus::kOptimal;
  solution.x = accepted->x;
  solution.objective_value = 0;
  for (int j = 0; j < n; ++j) solution.objective_value += lp.objective[j] * solution.x[j];
  if (!std::isfinite(solution.objective_value)) {
    throw NumericalBreakdown("optimal objective overflows double precision");
  }
  solution.inequality_duals.assign(lp.inequalities.size(), 0.0);
  solution.equality_duals.assign(lp.equalities.size(), 0.0);
  for (size_t r = 0; r < rows.size(); ++r) {
    const double y = accepted->row_duals[r] / rows[r].scale;
    if (rows[r].from_equality) {
      solution.equality_duals[rows[r].source] += rows[r].sign * y;
    } else {
      solution.inequality_duals[rows[r].source] = std::max(y, 0.0);
    }
  }
  return solution;
}

}  // namespace coalition_ledger
