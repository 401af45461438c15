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

#ifndef COALITION_LEDGER_ORACLE_H_
#define COALITION_LEDGER_ORACLE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <future>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coalition_ledger/game.h"

namespace coalition_ledger {

// Produces v(S) on demand. Query() memoizes: each distinct nonempty coalition
// is evaluated at most once per oracle, and only evaluations count as trials.
// Query() may be called from several threads at once; a coalition requested
// concurrently is still evaluated once.
class ValueOracle {
 public:
  explicit ValueOracle(std::vector<std::string> names);
  virtual ~ValueOracle() = default;

  ValueOracle(const ValueOracle&) = delete;
  ValueOracle& operator=(const ValueOracle&) = delete;

  double Query(Coalition s);

  int64_t trials_used() const { return trials_.load(); }
  int num_players() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& player_names() const { return names_; }

  // Every value obtained so far, evaluated or preloaded.
  Game::ValueTable KnownValues() const;

 protected:
  // Computes v(S) for a nonempty S. Must be safe to call concurrently for
  // distinct coalitions.
  virtual double Evaluate(Coalition s) = 0;

  // Seeds the memo without counting a trial.
  void Preload(Coalition s, double value);

 private:
  std::vector<std::string> names_;
  mutable std::mutex mu_;
  std::unordered_map<Coalition, std::shared_future<double>, CoalitionHash>
      memo_;
  std::atomic<int64_t> trials_{0};
};

// Serves values from a game's table; absent coalitions raise OracleMiss.
class TableOracle : public ValueOracle {
 public:
  explicit TableOracle(Game game);

  const Game& game() const { return game_; }

 protected:
  double Evaluate(Coalition s) override;

 private:
  Game game_;
};

// Runs an external program once per uncached coalition. The program receives
// {"players":[...]} plus a newline on stdin (names in roster order) and must
// print {"value": <finite number>} and exit 0.
class CommandOracle : public ValueOracle {
 public:
  // `argv` is the program and its fixed arguments. An empty `cache_path`
  // disables the cache; an existing cache file is loaded and must share the
  // roster.
  CommandOracle(std::vector<std::string> argv, std::vector<std::string> names,
                std::filesystem::path cache_path = {});
  ~CommandOracle() override;

  // Writes every known value to the cache file as a loadable game file.
  void Flush();

 protected:
  double Evaluate(Coalition s) override;

 private:
  std::string Describe(Coalition s) const;

  std::vector<std::string> argv_;
  std::filesystem::path cache_path_;
  std::mutex flush_mu_;
};

enum class SyntheticKind { kAdditive, kUnanimity, kCoverage };

// Deterministic test games.
//   additive:  v(S) = sum of weights[i] over S
//   unanimity: v(S) = 1 if carrier is a subset of S, else 0
//   coverage:  v(S) = (weight of items covered by S / weight of all items)^alpha
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kAdditive;
  uint64_t seed = 0;
  std::vector<double> weights;
  Coalition carrier;
  std::vector<std::vector<int>> items;  // item ids held by each player
  std::vector<double> item_weights;     // by item id; empty means unit weights
  double alpha = 1.0;
};

// Coverage game with `num_items` weighted items (default 2n), each owned by
// at least one player and shared with others at rate `density`. Identical
// arguments yield identical specs on every platform.
SyntheticSpec RandomCoverageSpec(int n, uint64_t seed, double alpha,
                                 int num_items = 0, double density = 0.25);

struct ParsedSynthetic {
  SyntheticSpec spec;
  int num_players = 0;
};

// Text forms:
//   additive:0.2,0.3,0.5
//   unanimity:n=4;carrier=a,b
//   coverage:n=10;seed=7;alpha=0.5[;items=20][;density=0.25]
// Throws BadSpec.
ParsedSynthetic ParseSyntheticSpec(std::string_view text);

class SyntheticOracle : public ValueOracle {
 public:
  // Throws BadSpec when the parameters do not fit n players.
  SyntheticOracle(const SyntheticSpec& spec, int n);

  // Direct evaluation without memoization; for tests and table building.
  double ValueFor(Coalition s) const;

 protected:
  double Evaluate(Coalition s) override { return ValueFor(s); }

 private:
  SyntheticSpec spec_;
  std::vector<std::vector<uint64_t>> item_masks_;  // per player, bit per item
  std::vector<double> item_weight_;
  double total_item_weight_ = 0;
};

// Queries every nonempty coalition (n <= 24) and returns the complete game.
Game MaterializeGame(ValueOracle& oracle,
                     std::optional<std::vector<double>> weights = {});

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_ORACLE_H_
