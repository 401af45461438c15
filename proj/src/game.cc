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

#include "coalition_ledger/game.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "coalition_ledger/errors.h"

namespace coalition_ledger {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<int> Coalition::Members() const {
  std::vector<int> members;
  members.reserve(size());
  for (uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
    members.push_back(std::countr_zero(rest));
  }
  return members;
}

Game::Game(std::vector<std::string> names, ValueTable values,
           std::optional<std::vector<double>> weights)
    : names_(std::move(names)),
      values_(std::move(values)),
      weights_(std::move(weights)) {
  const int n = num_players();
  if (n < 1 || n > kMaxPlayers) {
    throw LoadError("player count must be in [1, 64], got " +
                    std::to_string(n));
  }
  std::set<std::string_view> seen;
  for (const std::string& name : names_) {
    if (name.empty() || name.find(',') != std::string::npos ||
        Trim(name) != name) {
      throw LoadError("invalid player name '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw LoadError("duplicate player name '" + name + "'");
    }
  }
  const Coalition grand_coalition = grand();
  for (const auto& [s, v] : values_) {
    if (s.empty()) throw LoadError("value table contains the empty coalition");
    if (!s.IsSubsetOf(grand_coalition)) {
      throw LoadError("coalition key references a player index >= " +
                      std::to_string(n));
    }
    if (!std::isfinite(v)) {
      throw LoadError("non-finite value for coalition '" + Key(s) + "'");
    }
  }
  if (weights_) {
    if (static_cast<int>(weights_->size()) != n) {
      throw LoadError("weights has " + std::to_string(weights_->size()) +
                      " entries for " + std::to_string(n) + " players");
    }
    for (double w : *weights_) {
      if (!std::isfinite(w) || w < 0) {
        throw LoadError("weights must be finite and non-negative");
      }
    }
  }
}

std::optional<int> Game::IndexOf(std::string_view name) const {
  for (int i = 0; i < num_players(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::string Game::Key(Coalition s) const {
  std::string key;
  for (int i : s.Members()) {
    if (!key.empty()) key += ',';
    key += i < num_players() ? names_[i] : "#" + std::to_string(i);
  }
  return key;
}

Coalition Game::ParseKey(std::string_view key) const {
  Coalition s;
  if (Trim(key).empty()) return s;
  size_t start = 0;
  while (true) {
    const size_t comma = key.find(',', start);
    const std::string_view part = Trim(key.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start));
    const std::optional<int> index = IndexOf(part);
    if (!index) throw UnknownPlayer("unknown player '" + std::string(part) + "'");
    s = s.With(PlayerId(*index));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return s;
}

Game Game::WithValues(ValueTable values) const {
  return Game(names_, std::move(values), weights_);
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kLeastCore:
      return "least_core";
    case Method::kShapley:
      return "shapley";
    case Method::kLeaveOneOut:
      return "leave_one_out";
    case Method::kProportional:
      return "proportional";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  if (name == "least_core" || name == "lc") return Method::kLeastCore;
  if (name == "shapley" || name == "sv") return Method::kShapley;
  if (name == "leave_one_out" || name == "loo") return Method::kLeaveOneOut;
  if (name == "proportional") return Method::kProportional;
  throw BadSpec("unknown method '" + std::string(name) + "'");
}

Coalition CoalitionFromNames(std::span<const std::string> names,
                             const Game& game) {
  Coalition s;
  for (const std::string& name : names) {
    const std::optional<int> index = game.IndexOf(name);
    if (!index) throw UnknownPlayer("unknown player '" + name + "'");
    s = s.With(PlayerId(*index));
  }
  return s;
}

std::optional<double> ValueOf(const Game& game, Coalition s) {
  if (s.empty()) return 0.0;
  const auto it = game.values().find(s);
  if (it == game.values().end()) return std::nullopt;
  return it->second;
}

bool ValidateComplete(const Game& game) {
  const int n = game.num_players();
  if (n >= 63) return false;
  const uint64_t expected = (uint64_t{1} << n) - 1;
  // Keys are range-checked on construction, so counting suffices.
  return game.values().size() == expected;
}

std::vector<Coalition> MissingCoalitions(const Game& game) {
  const int n = game.num_players();
  if (n > 30) throw TooManyPlayers("cannot enumerate 2^" + std::to_string(n));
  std::vector<Coalition> missing;
  const uint64_t limit = uint64_t{1} << n;
  for (uint64_t bits = 1; bits < limit; ++bits) {
    if (!game.values().contains(Coalition(bits))) {
      missing.emplace_back(bits);
    }
  }
  return missing;
}

Game GameFromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw LoadError("game file must be a JSON object");
  if (!doc.contains("players") || !doc["players"].is_array()) {
    throw LoadError("game file needs a 'players' array");
  }
  std::vector<std::string> names;
  for (const auto& p : doc["players"]) {
    if (!p.is_string()) throw LoadError("player names must be strings");
    names.push_back(p.get<std::string>());
  }
  std::optional<std::vector<double>> weights;
  if (doc.contains("weights") && !doc["weights"].is_null()) {
    if (!doc["weights"].is_array()) throw LoadError("'weights' must be an array");
    weights.emplace();
    for (const auto& w : doc["weights"]) {
      if (!w.is_number()) throw LoadError("weights must be numbers");
      weights->push_back(w.get<double>());
    }
  }
  // Roster-only game, used to resolve keys before the table exists.
  const Game roster(names, {}, weights);

  Game::ValueTable values;
  if (doc.contains("values")) {
    if (!doc["values"].is_object()) throw LoadError("'values' must be an object");
    for (const auto& [key, value] : doc["values"].items()) {
      if (!value.is_number()) {
        throw LoadError("value for '" + key + "' is not a number");
      }
      Coalition s;
      try {
        s = roster.ParseKey(key);
      } catch (const UnknownPlayer& e) {
        throw UnknownPlayer(std::string(e.what()) + " in key '" + key + "'");
      }
      if (s.empty()) throw LoadError("empty coalition key in 'values'");
      if (!values.emplace(s, value.get<double>()).second) {
        throw LoadError("duplicate coalition key '" + key + "' (same as '" +
                        roster.Key(s) + "')");
      }
    }
  }
  return roster.WithValues(std::move(values));
}

Game ParseGame(std::string_view text) {
  std::set<std::string> raw_keys;
  std::string duplicate;
  // Depth-2 keys are exactly the members of the "values" object.
  auto on_event = [&](int depth, nlohmann::json::parse_event_t event,
                      nlohmann::json& parsed) {
    if (event == nlohmann::json::parse_event_t::key && depth == 2 &&
        !raw_keys.insert(parsed.get<std::string>()).second) {
      duplicate = parsed.get<std::string>();
    }
    return true;
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, on_event, /*allow_exceptions=*/true,
                                /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(std::string("malformed JSON: ") + e.what());
  }
  if (!duplicate.empty()) {
    throw LoadError("duplicate coalition key '" + duplicate + "'");
  }
  return GameFromJson(doc);
}

Game LoadGame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open game file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseGame(buffer.str());
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

nlohmann::json GameToJson(const Game& game) {
  nlohmann::json doc;
  doc["players"] = game.names();
  nlohmann::json values = nlohmann::json::object();
  for (const auto& [s, v] : game.values()) values[game.Key(s)] = v;
  doc["values"] = std::move(values);
  if (game.weights()) doc["weights"] = *game.weights();
  return doc;
}

void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw LoadError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw LoadError("cannot rename into " + path.string() + ": " +
                    ec.message());
  }
}

void SaveGame(const Game& game, const std::filesystem::path& path) {
  WriteFileAtomically(path, GameToJson(game).dump(2) + "\n");
}

std::vector<std::string> DefaultPlayerNames(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) {
    names.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i))
                            : "p" + std::to_string(i + 1));
  }
  return names;
}

}  // namespace coalition_ledger
