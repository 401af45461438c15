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

#ifndef COALITION_LEDGER_PRUNER_H_
#define COALITION_LEDGER_PRUNER_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "coalition_ledger/game.h"
#include "coalition_ledger/oracle.h"
#include "json.hpp"

namespace coalition_ledger {

struct PruneConfig {
  double t1 = 0;  // Rule 1: minimum marginal gain over the canonical parent
  double t2 = 0;  // Rule 2: minimum remaining gap to v_grand
  double v_grand = 0;
};

enum class Decision { kExpanded, kPrunedRule1, kPrunedRule2, kLeaf };

std::string_view DecisionName(Decision decision);

struct LogEntry {
  Coalition coalition;
  double value = 0;
  Coalition parent;
  Decision decision = Decision::kExpanded;
};

struct EvaluationLog {
  std::vector<LogEntry> entries;

  int64_t evaluated_count() const {
    return static_cast<int64_t>(entries.size());
  }
  int64_t Count(Decision decision) const;
};

// Depth-first walk of the set-enumeration tree rooted at the empty coalition,
// where the children of S are S + {j} for every j above S's highest member.
// Each visited child C of parent S is queried and then:
//   v(C) - v(S) < t1          -> PrunedRule1, subtree skipped
//   else v_grand - v(C) < t2  -> PrunedRule2, subtree skipped
//   else no children          -> Leaf
//   else                      -> Expanded
// The grand coalition is never queried; its value is config.v_grand.
//
// `log` is filled as the walk proceeds, so it holds the partial log when an
// oracle error propagates. With threads > 1 up to that many pending nodes are
// queried concurrently; the evaluated set and every decision are unchanged,
// only the entry order may differ.
//
// Returns the evaluated values plus the grand coalition at v_grand.
Game PruneEnumerate(ValueOracle& oracle, const PruneConfig& config,
                    EvaluationLog& log, int threads = 1);

// JSON-lines export: one object per entry, then {"summary": {...}}.
std::string LogToJsonLines(const EvaluationLog& log, const PruneConfig& config,
                           const std::vector<std::string>& names);
nlohmann::json LogSummary(const EvaluationLog& log, const PruneConfig& config,
                          int num_players);

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_PRUNER_H_
