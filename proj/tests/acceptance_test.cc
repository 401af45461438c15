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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <stdlib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coalition_ledger/allocator.h"
#include "coalition_ledger/cli.h"
#include "coalition_ledger/errors.h"
#include "coalition_ledger/lp_solver.h"
#include "coalition_ledger/oracle.h"
#include "coalition_ledger/pruner.h"
#include "support/oracles.h"
#include "support/random_lp.h"
#include "support/temp_dir.h"

namespace coalition_ledger {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed condition without stopping the criterion.
  void Require(bool condition, const std::string& what) {
    if (!condition) {
      if (pass) detail << "failed: ";
      detail << what << "; ";
      pass = false;
    }
  }
};

std::string Vec(const std::vector<double>& x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << "(";
  for (size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ")";
  return out.str();
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::function<double(uint64_t)> RandomValues(std::mt19937_64& rng) {
  auto table = std::make_shared<std::map<uint64_t, double>>();
  auto engine = std::make_shared<std::mt19937_64>(rng());
  return [table, engine](uint64_t s) {
    auto it = table->find(s);
    if (it != table->end()) return it->second;
    const double v = std::uniform_real_distribution<double>(-1, 2)(*engine);
    table->emplace(s, v);
    return v;
  };
}

double Sum(const std::vector<double>& x) {
  double total = 0;
  for (double v : x) total += v;
  return total;
}

void HeartLeastCore(Outcome& o) {
  const Game heart = testing::HeartDiseaseGame();
  const LeastCoreResult lc = SolveLeastCore(heart, GrandValue(heart));
  const double expected[] = {0.1429, 0.2500, 0.4643};
  for (int i = 0; i < 3; ++i) {
    o.Require(std::abs(lc.allocation.phi[i] - expected[i]) <= 1e-3,
              "phi[" + std::to_string(i) + "]");
  }
  o.Require(std::abs(lc.e_star - 0.3571) <= 1e-3, "e*");
  const testing::EnumeratedLp brute =
      testing::EnumerateBasicSolutions(BuildLeastCoreLp(heart, GrandValue(heart)));
  o.Require(brute.status == LpStatus::kOptimal &&
                std::abs(brute.objective - lc.e_star) <= 1e-9,
            "e* differs from basis enumeration");
  o.Require(lc.binding == std::vector<Coalition>{Coalition(0b001), Coalition(0b010),
                                                 Coalition(0b100)},
            "binding set is not the three singletons");
  o.detail << "phi=" << Vec(lc.allocation.phi) << " e*=" << std::setprecision(4)
           << lc.e_star << " binding=" << lc.binding.size();
}

void HeartShapley(Outcome& o) {
  const Allocation sv = ShapleyExact(testing::HeartDiseaseGame());
  const double expected[] = {0.1786, 0.2500, 0.4285};
  for (int i = 0; i < 3; ++i) {
    o.Require(std::abs(sv.phi[i] - expected[i]) <= 1e-3,
              "phi[" + std::to_string(i) + "]");
  }
  o.detail << "phi=" << Vec(sv.phi);
}

void HeartOrdering(Outcome& o) {
  const Game heart = testing::HeartDiseaseGame();
  const Allocation lc = SolveLeastCore(heart, GrandValue(heart)).allocation;
  const Allocation sv = ShapleyExact(heart);
  o.Require(lc.phi[2] > sv.phi[2], "LC(c) <= SV(c)");
  o.Require(lc.phi[0] < sv.phi[0], "LC(a) >= SV(a)");
  o.detail << std::fixed << std::setprecision(4) << "LC(c)=" << lc.phi[2]
           << " > SV(c)=" << sv.phi[2] << ", LC(a)=" << lc.phi[0]
           << " < SV(a)=" << sv.phi[0];
}

void FullEnumeration(Outcome& o) {
  for (int n : {7, 16}) {
    const auto start = std::chrono::steady_clock::now();
    SyntheticOracle oracle(RandomCoverageSpec(n, 7, 0.5), n);
    EvaluationLog log;
    PruneEnumerate(oracle, {0, 0, oracle.Query(Coalition::Grand(n))}, log);
    const double seconds = Seconds(start);
    const int64_t expected = (int64_t{1} << n) - 2;
    o.Require(log.evaluated_count() == expected,
              "n=" + std::to_string(n) + " count " +
                  std::to_string(log.evaluated_count()));
    o.Require(seconds < 10.0, "n=" + std::to_string(n) + " took too long");
    o.detail << "n=" << n << ": " << log.evaluated_count() << " in "
             << std::fixed << std::setprecision(2) << seconds << "s  ";
  }
}

void PruningEfficacy(Outcome& o) {
  // Regression snapshots at t1 = t2 = 0.1, n = 16, alpha = 0.5.
  const std::pair<uint64_t, int64_t> snapshots[] = {
      {1, 1778}, {2, 1331}, {3, 1225}, {4, 1606}, {5, 1641}, {7, 1041}};
  const double grid[] = {0.0, 0.05, 0.1, 0.15};
  for (const auto& [seed, snapshot] : snapshots) {
    SyntheticOracle oracle(RandomCoverageSpec(16, seed, 0.5), 16);
    const double v_grand = oracle.Query(Coalition::Grand(16));
    int64_t counts[4][4];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        EvaluationLog log;
        PruneEnumerate(oracle, {grid[i], grid[j], v_grand}, log);
        counts[i][j] = log.evaluated_count();
      }
    }
    const int64_t balanced = counts[2][2];
    const std::string tag = "seed " + std::to_string(seed);
    o.Require(balanced * 20 < 65534, tag + " not under 5%");
    o.Require(balanced == snapshot, tag + " count " + std::to_string(balanced) +
                                        " != snapshot " + std::to_string(snapshot));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i + 1 < 4) {
          o.Require(counts[i + 1][j] <= counts[i][j], tag + " grid not monotone in t1");
        }
        if (j + 1 < 4) {
          o.Require(counts[i][j + 1] <= counts[i][j], tag + " grid not monotone in t2");
        }
      }
    }
    o.detail << seed << ":" << balanced << " (" << std::fixed
             << std::setprecision(2) << 100.0 * balanced / 65534 << "%) ";
  }
}

void RelaxationMonotonicity(Outcome& o) {
  std::mt19937_64 rng(606);
  double min_cosine = 1, sum_cosine = 0;
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 6;
    SyntheticOracle oracle(RandomCoverageSpec(n, rng(), 0.5), n);
    const Game full = MaterializeGame(oracle);
    const double v_grand = GrandValue(full);
    const double t = 0.05 + 0.05 * static_cast<double>(rng() % 3);
    EvaluationLog log;
    const Game pruned = PruneEnumerate(oracle, {t, t, v_grand}, log);
    const LeastCoreResult lc_full = SolveLeastCore(full, v_grand);
    const LeastCoreResult lc_pruned = SolveLeastCore(pruned, v_grand);
    if (lc_pruned.e_star > lc_full.e_star + 1e-9) ++violations;
    const double cosine =
        CosineSimilarity(lc_full.allocation.phi, lc_pruned.allocation.phi);
    min_cosine = std::min(min_cosine, cosine);
    sum_cosine += cosine;
  }
  o.Require(violations == 0, std::to_string(violations) + " games violate");
  o.detail << "100 games, cosine(pruned, full) mean=" << std::fixed
           << std::setprecision(4) << sum_cosine / 100 << " min=" << min_cosine;
}

void LpOracleEquivalence(Outcome& o) {
  std::mt19937_64 rng(707);
  int optimal = 0, infeasible = 0, unbounded = 0, drawn = 0;
  double worst = 0;
  while (optimal < 200) {
    const LinearProgram lp = testing::RandomLp(rng);
    ++drawn;
    const testing::EnumeratedLp brute = testing::EnumerateBasicSolutions(lp);
    const LpSolution sol = SolveLp(lp);
    if (sol.status != brute.status) {
      o.Require(false, "classification differs on draw " + std::to_string(drawn));
      continue;
    }
    switch (sol.status) {
      case LpStatus::kOptimal:
        ++optimal;
        worst = std::max(worst, std::abs(sol.objective_value - brute.objective));
        break;
      case LpStatus::kInfeasible:
        ++infeasible;
        break;
      case LpStatus::kUnbounded:
        ++unbounded;
        break;
    }
  }
  o.Require(worst <= 1e-7, "objective gap too large");
  o.detail << optimal << " optimal (max gap " << std::scientific
           << std::setprecision(1) << worst << "), " << infeasible
           << " infeasible, " << unbounded << " unbounded agree";
}

void ShapleyAxioms(Outcome& o) {
  std::mt19937_64 rng(808);
  double worst = 0;
  int games = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 7;
    auto base = RandomValues(rng);
    const Game game = testing::TabulateGame(n, base);
    const Allocation sv = ShapleyExact(game);
    worst = std::max(worst, std::abs(Sum(sv.phi) - GrandValue(game)));

    const int null_player = static_cast<int>(rng() % n);
    const uint64_t null_bit = uint64_t{1} << null_player;
    const Allocation with_null = ShapleyExact(testing::TabulateGame(n, [&](uint64_t s) {
      const uint64_t rest = s & ~null_bit;
      return rest == 0 ? 0.0 : base(rest);
    }));
    worst = std::max(worst, std::abs(with_null.phi[null_player]));

    const int i = static_cast<int>(rng() % n);
    const int j = (i + 1 + static_cast<int>(rng() % (n - 1))) % n;
    auto swap = [&](uint64_t s) {
      const uint64_t bi = s >> i & 1, bj = s >> j & 1;
      s &= ~((uint64_t{1} << i) | (uint64_t{1} << j));
      return s | bi << j | bj << i;
    };
    const Allocation sym = ShapleyExact(
        testing::TabulateGame(n, [&](uint64_t s) { return base(std::min(s, swap(s))); }));
    worst = std::max(worst, std::abs(sym.phi[i] - sym.phi[j]));

    auto other = RandomValues(rng);
    const Allocation w = ShapleyExact(testing::TabulateGame(n, other));
    const Allocation sum = ShapleyExact(
        testing::TabulateGame(n, [&](uint64_t s) { return base(s) + other(s); }));
    for (int k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(sum.phi[k] - sv.phi[k] - w.phi[k]));
    }
    ++games;
  }
  o.Require(worst <= 1e-9, "axiom residual too large");
  o.detail << games << " games (n=2..8), max residual " << std::scientific
           << std::setprecision(1) << worst;
}

void AdditivePinpointing(Outcome& o) {
  std::mt19937_64 rng(909);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    SyntheticSpec spec;
    spec.kind = SyntheticKind::kAdditive;
    for (int i = 0; i < n; ++i) {
      spec.weights.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    }
    SyntheticOracle oracle(spec, n);
    const Game game = MaterializeGame(oracle);
    const LeastCoreResult lc = SolveLeastCore(game, GrandValue(game));
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(lc.allocation.phi[i] - spec.weights[i]));
    }
    worst = std::max(worst, std::abs(lc.e_star));
  }
  o.Require(worst <= 1e-9, "additive residual too large");

  double unanimity_worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    SyntheticSpec spec;
    spec.kind = SyntheticKind::kUnanimity;
    // Proper carriers only; a carrier equal to the roster leaves no
    // non-carrier player and is checked separately below.
    const uint64_t grand = (uint64_t{1} << n) - 1;
    uint64_t carrier = 0;
    while (carrier == 0 || carrier == grand) carrier = rng() & grand;
    spec.carrier = Coalition(carrier);
    SyntheticOracle oracle(spec, n);
    const Game game = MaterializeGame(oracle);
    const LeastCoreResult lc = SolveLeastCore(game, 1.0);
    unanimity_worst = std::max(unanimity_worst, std::abs(lc.e_star));
    for (int i = 0; i < n; ++i) {
      if (!(carrier >> i & 1)) {
        unanimity_worst = std::max(unanimity_worst, std::abs(lc.allocation.phi[i]));
      }
    }
  }
  o.Require(unanimity_worst <= 1e-9, "unanimity residual too large");

  // With the whole roster as carrier every proper coalition is worth 0, so
  // the equal split is optimal with e* = -1/n.
  double full_carrier_worst = 0;
  for (int n = 2; n <= 6; ++n) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::kUnanimity;
    spec.carrier = Coalition::Grand(n);
    SyntheticOracle oracle(spec, n);
    const LeastCoreResult lc = SolveLeastCore(MaterializeGame(oracle), 1.0);
    full_carrier_worst = std::max(full_carrier_worst, std::abs(lc.e_star + 1.0 / n));
  }
  o.Require(full_carrier_worst <= 1e-9, "full-roster carrier e* != -1/n");
  o.detail << "50 additive games max residual " << std::scientific
           << std::setprecision(1) << worst << "; 20 unanimity games max residual "
           << unanimity_worst;
}

void ProportionalShare(Outcome& o) {
  const std::vector<double> weights = {4817, 2210, 1650, 1323};
  Game::ValueTable values;
  for (int i = 0; i < 4; ++i) values.emplace(Coalition::Singleton(PlayerId{i}), 0.1);
  values.emplace(Coalition::Grand(4), 1.0);
  const Allocation p = Proportional(Game(DefaultPlayerNames(4), values, weights));
  const double share = p.phi[0] / 1.0;
  o.Require(std::abs(share - 0.4817) <= 1e-4, "share off");
  o.detail << "phi_1/v(D)=" << std::fixed << std::setprecision(4) << share;
}

void EndToEndRoundTrip(Outcome& o) {
  testing::TempDir dir;
  // Stub oracle: 1 - prod(1 - p_i) over the requested players.
  const std::filesystem::path stub = dir.Script(
      "stub.sh",
      "awk '{v=1; if (index($0,\"\\\"a\\\"\")) v*=0.5; "
      "if (index($0,\"\\\"b\\\"\")) v*=0.7; "
      "if (index($0,\"\\\"c\\\"\")) v*=0.8; "
      "if (index($0,\"\\\"d\\\"\")) v*=0.6; "
      "if (index($0,\"\\\"e\\\"\")) v*=0.9; "
      "printf \"{\\\"value\\\": %.17g}\\n\", 1-v}'");
  const std::string cache = (dir.path() / "cache.json").string();
  const std::vector<std::string> source = {"--oracle-cmd", stub.string(),
                                           "--players", "a,b,c,d,e"};
  const std::vector<std::string> thresholds = {"--t1", "0.04", "--t2", "0.04"};
  auto run = [](std::vector<std::string> args,
                std::initializer_list<std::vector<std::string>> extra,
                std::string& out) {
    for (const auto& e : extra) args.insert(args.end(), e.begin(), e.end());
    std::ostringstream o, err;
    const int code = RunCli(args, o, err);
    out = o.str();
    return code;
  };
  std::string direct, prune_log, replay;
  o.Require(run({"solve"}, {source, thresholds}, direct) == 0, "in-process solve");
  o.Require(run({"prune", "--cache", cache}, {source, thresholds}, prune_log) == 0,
            "prune");
  o.Require(run({"solve", "--game", cache}, {thresholds}, replay) == 0,
            "solve from cache");
  o.Require(!direct.empty() && direct == replay, "reports differ");
  std::istringstream lines(prune_log);
  int logged = 0;
  for (std::string line; std::getline(lines, line);) ++logged;
  o.detail << "report " << direct.size() << " bytes identical, "
           << logged - 1 << " coalitions logged";
}

}  // namespace
}  // namespace coalition_ledger

int main() {
  using coalition_ledger::Outcome;
  const std::pair<const char*, void (*)(Outcome&)> criteria[] = {
      {"heart-disease least core", coalition_ledger::HeartLeastCore},
      {"heart-disease Shapley", coalition_ledger::HeartShapley},
      {"least core favors c over Shapley", coalition_ledger::HeartOrdering},
      {"full-enumeration count", coalition_ledger::FullEnumeration},
      {"pruning efficacy", coalition_ledger::PruningEfficacy},
      {"relaxation monotonicity", coalition_ledger::RelaxationMonotonicity},
      {"LP oracle equivalence", coalition_ledger::LpOracleEquivalence},
      {"Shapley axioms", coalition_ledger::ShapleyAxioms},
      {"additive-game pinpointing", coalition_ledger::AdditivePinpointing},
      {"proportional baseline", coalition_ledger::ProportionalShare},
      {"end-to-end round trip", coalition_ledger::EndToEndRoundTrip},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, body] : criteria) {
    ++index;
    Outcome outcome;
    try {
      body(outcome);
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << "exception: " << e.what();
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << index
              << " " << name << ": " << outcome.detail.str() << std::endl;
  }
  std::cout << (11 - failures) << "/11 criteria passed" << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
