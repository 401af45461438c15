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

#ifndef COALITION_LEDGER_GAME_H_
#define COALITION_LEDGER_GAME_H_

#include <bit>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace coalition_ledger {

inline constexpr int kMaxPlayers = 64;

// Index of a player in its game's roster, in [0, n).
struct PlayerId {
  int index = 0;

  constexpr explicit PlayerId(int i) : index(i) {}
  friend constexpr auto operator<=>(PlayerId, PlayerId) = default;
};

// A set of players stored as one machine word: bit i set iff player i is a
// member. Ordering is by the raw bitmask, which is also the order in which
// stability rows are emitted.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(uint64_t bits) : bits_(bits) {}

  static constexpr Coalition Singleton(PlayerId p) {
    return Coalition(uint64_t{1} << p.index);
  }
  // The coalition of all n players.
  static constexpr Coalition Grand(int n) {
    return Coalition(n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1);
  }

  constexpr uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool Contains(PlayerId p) const { return (bits_ >> p.index) & 1; }
  constexpr bool IsSubsetOf(Coalition other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  // Highest member index; -1 for the empty coalition.
  constexpr int MaxIndex() const { return 63 - std::countl_zero(bits_); }

  constexpr Coalition With(PlayerId p) const {
    return Coalition(bits_ | (uint64_t{1} << p.index));
  }
  constexpr Coalition Without(PlayerId p) const {
    return Coalition(bits_ & ~(uint64_t{1} << p.index));
  }
  constexpr Coalition Union(Coalition other) const {
    return Coalition(bits_ | other.bits_);
  }

  // Member indices in ascending order.
  std::vector<int> Members() const;

  friend constexpr auto operator<=>(Coalition, Coalition) = default;

 private:
  uint64_t bits_ = 0;
};

struct CoalitionHash {
  size_t operator()(Coalition c) const noexcept {
    return std::hash<uint64_t>{}(c.bits());
  }
};

// A characteristic-function game, possibly with only part of its value table
// known. v(empty) is always 0 and never stored. Immutable once built.
class Game {
 public:
  using ValueTable = std::map<Coalition, double>;

  // Throws LoadError if the roster or table is inconsistent.
  Game(std::vector<std::string> names, ValueTable values,
       std::optional<std::vector<double>> weights = std::nullopt);

  int num_players() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const ValueTable& values() const { return values_; }
  const std::optional<std::vector<double>>& weights() const {
    return weights_;
  }
  Coalition grand() const { return Coalition::Grand(num_players()); }

  std::optional<int> IndexOf(std::string_view name) const;

  // Players in roster order, comma-joined: the canonical key of the file
  // format. The empty coalition renders as "".
  std::string Key(Coalition s) const;
  // Inverse of Key. Whitespace around names is ignored; duplicates collapse.
  // Throws UnknownPlayer.
  Coalition ParseKey(std::string_view key) const;

  // Same roster (and weights) with a different value table.
  Game WithValues(ValueTable values) const;

 private:
  std::vector<std::string> names_;
  ValueTable values_;
  std::optional<std::vector<double>> weights_;
};

enum class Method { kLeastCore, kShapley, kLeaveOneOut, kProportional };

std::string_view MethodName(Method method);
// Accepts the canonical names plus "lc", "sv" and "loo". Throws BadSpec.
Method ParseMethod(std::string_view name);

struct Allocation {
  Method method = Method::kLeastCore;
  std::vector<double> phi;
};

// Throws UnknownPlayer for names outside the roster.
Coalition CoalitionFromNames(std::span<const std::string> names,
                             const Game& game);

// v(S); nullopt when S was never evaluated. v(empty) == 0.
std::optional<double> ValueOf(const Game& game, Coalition s);

// True iff every nonempty subset of the roster has a value.
bool ValidateComplete(const Game& game);

// Nonempty coalitions of the roster missing from the table, ascending.
std::vector<Coalition> MissingCoalitions(const Game& game);

// Game file (de)serialization. Comments are accepted in input files.
// Keys naming the same coalition (after sorting and deduplicating members)
// are a LoadError, as are repeated raw keys when parsing text.
Game GameFromJson(const nlohmann::json& doc);
Game ParseGame(std::string_view text);
Game LoadGame(const std::filesystem::path& path);
nlohmann::json GameToJson(const Game& game);

// Writes through a temporary sibling file and renames it into place.
void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view contents);
void SaveGame(const Game& game, const std::filesystem::path& path);

// "a", "b", ... for n <= 26, otherwise "p1".."pn".
std::vector<std::string> DefaultPlayerNames(int n);

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_GAME_H_
