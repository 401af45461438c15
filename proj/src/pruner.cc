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

#include "coalition_ledger/pruner.h"

#include <algorithm>
#include <exception>
#include <future>
#include <optional>
#include <sstream>

namespace coalition_ledger {
namespace {

struct PendingNode {
  Coalition node;
  Coalition parent;
  double parent_value = 0;
};

Decision Decide(const PendingNode& pending, double value,
                const PruneConfig& config, int n) {
  if (value - pending.parent_value < config.t1) return Decision::kPrunedRule1;
  if (config.v_grand - value < config.t2) return Decision::kPrunedRule2;
  if (pending.node.MaxIndex() == n - 1) return Decision::kLeaf;
  return Decision::kExpanded;
}

// Children in descending index order, so the smallest index is popped first.
void PushChildren(std::vector<PendingNode>& stack, Coalition node,
                  double value, int n) {
  const Coalition grand = Coalition::Grand(n);
  for (int j = n - 1; j > node.MaxIndex(); --j) {
    const Coalition child = node.With(PlayerId(j));
    if (child == grand) continue;
    stack.push_back({child, node, value});
  }
}

}  // namespace

std::string_view DecisionName(Decision decision) {
  switch (decision) {
    case Decision::kExpanded:
      return "Expanded";
    case Decision::kPrunedRule1:
      return "PrunedRule1";
    case Decision::kPrunedRule2:
      return "PrunedRule2";
    case Decision::kLeaf:
      return "Leaf";
  }
  return "Unknown";
}

int64_t EvaluationLog::Count(Decision decision) const {
  return std::count_if(entries.begin(), entries.end(),
                       [&](const LogEntry& e) { return e.decision == decision; });
}

Game PruneEnumerate(ValueOracle& oracle, const PruneConfig& config,
                    EvaluationLog& log, int threads) {
  const int n = oracle.num_players();
  threads = std::max(threads, 1);
  log.entries.clear();

  std::vector<PendingNode> stack;
  PushChildren(stack, Coalition(), 0.0, n);

  std::vector<PendingNode> batch;
  std::vector<std::optional<double>> values;
  while (!stack.empty()) {
    batch.clear();
    while (!stack.empty() && static_cast<int>(batch.size()) < threads) {
      batch.push_back(stack.back());
      stack.pop_back();
    }

    values.assign(batch.size(), std::nullopt);
    std::exception_ptr failure;
    if (batch.size() == 1) {
      try {
        values[0] = oracle.Query(batch[0].node);
      } catch (...) {
        failure = std::current_exception();
      }
    } else {
      std::vector<std::future<double>> futures;
      futures.reserve(batch.size());
      for (const PendingNode& pending : batch) {
        futures.push_back(std::async(std::launch::async, [&oracle, pending] {
          return oracle.Query(pending.node);
        }));
      }
      for (size_t k = 0; k < futures.size(); ++k) {
        try {
          values[k] = futures[k].get();
        } catch (...) {
          if (!failure) failure = std::current_exception();
        }
      }
    }

    // Children go on the stack in reverse so the batch unwinds in DFS order.
    std::vector<std::pair<Coalition, double>> expanded;
    for (size_t k = 0; k < batch.size(); ++k) {
      if (!values[k]) continue;
      const PendingNode& pending = batch[k];
      const Decision decision = Decide(pending, *values[k], config, n);
      log.entries.push_back(
          {pending.node, *values[k], pending.parent, decision});
      if (decision == Decision::kExpanded) {
        expanded.emplace_back(pending.node, *values[k]);
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (auto it = expanded.rbegin(); it != expanded.rend(); ++it) {
      PushChildren(stack, it->first, it->second, n);
    }
  }

  Game::ValueTable values_table;
  for (const LogEntry& entry : log.entries) {
    values_table.emplace(entry.coalition, entry.value);
  }
  values_table.emplace(Coalition::Grand(n), config.v_grand);
  return Game(oracle.player_names(), std::move(values_table));
}

nlohmann::json LogSummary(const EvaluationLog& log, const PruneConfig& config,
                          int num_players) {
  nlohmann::json summary;
  summary["n"] = num_players;
  summary["t1"] = config.t1;
  summary["t2"] = config.t2;
  summary["v_grand"] = config.v_grand;
  summary["evaluated_count"] = log.evaluated_count();
  summary["expanded"] = log.Count(Decision::kExpanded);
  summary["pruned_rule1"] = log.Count(Decision::kPrunedRule1);
  summary["pruned_rule2"] = log.Count(Decision::kPrunedRule2);
  summary["leaf"] = log.Count(Decision::kLeaf);
  return summary;
}

std::string LogToJsonLines(const EvaluationLog& log, const PruneConfig& config,
                           const std::vector<std::string>& names) {
  const Game roster(names, {});
  std::ostringstream out;
  for (const LogEntry& entry : log.entries) {
    nlohmann::ordered_json line;
    line["coalition"] = roster.Key(entry.coalition);
    line["value"] = entry.value;
    line["parent"] = roster.Key(entry.parent);
    line["decision"] = DecisionName(entry.decision);
    out << line.dump() << "\n";
  }
  nlohmann::json summary;
  summary["summary"] = LogSummary(log, config, roster.num_players());
  out << summary.dump() << "\n";
  return out.str();
}

}  // namespace coalition_ledger
