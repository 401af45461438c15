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

#include "coalition_ledger/oracle.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstring>
#include <random>

#include "coalition_ledger/errors.h"

extern char** environ;

namespace coalition_ledger {

ValueOracle::ValueOracle(std::vector<std::string> names)
    : names_(std::move(names)) {}

double ValueOracle::Query(Coalition s) {
  if (s.empty()) return 0.0;
  std::promise<double> promise;
  std::shared_future<double> result;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = memo_.try_emplace(s);
    if (inserted) {
      it->second = promise.get_future().share();
      owner = true;
    }
    result = it->second;
  }
  if (owner) {
    try {
      const double value = Evaluate(s);
      trials_.fetch_add(1);
      promise.set_value(value);
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return result.get();
}

Game::ValueTable ValueOracle::KnownValues() const {
  Game::ValueTable table;
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [s, future] : memo_) {
    using namespace std::chrono_literals;
    if (future.wait_for(0s) != std::future_status::ready) continue;
    try {
      table.emplace(s, future.get());
    } catch (const std::exception&) {
      // Failed evaluations have no value to report.
    }
  }
  return table;
}

void ValueOracle::Preload(Coalition s, double value) {
  std::promise<double> promise;
  promise.set_value(value);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.insert_or_assign(s, promise.get_future().share());
}

TableOracle::TableOracle(Game game)
    : ValueOracle(game.names()), game_(std::move(game)) {}

double TableOracle::Evaluate(Coalition s) {
  const std::optional<double> value = ValueOf(game_, s);
  if (!value) {
    const std::string label = s.IsSubsetOf(game_.grand())
                                  ? "{" + game_.Key(s) + "}"
                                  : "bitmask " + std::to_string(s.bits());
    throw OracleMiss("no value for coalition " + label);
  }
  return *value;
}

// ---------------------------------------------------------------------------
// CommandOracle

namespace {

void IgnoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction action {};
    action.sa_handler = SIG_IGN;
    sigemptyset(&action.sa_mask);
    sigaction(SIGPIPE, &action, nullptr);
  });
}

struct ProcessResult {
  int status = 0;
  std::string out;
};

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { Close(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }
  void Close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

// Spawns argv with `input` on stdin and collects stdout. Every descriptor is
// close-on-exec so concurrent spawns do not keep each other's pipes open.
ProcessResult RunProcess(const std::vector<std::string>& argv,
                         std::string_view input, const std::string& context) {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw OracleProcessFailure(context + ": pipe: " + std::strerror(errno));
  }
  Fd in_read(in_pipe[0]), in_write(in_pipe[1]);
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    throw OracleProcessFailure(context + ": pipe: " + std::strerror(errno));
  }
  Fd out_read(out_pipe[0]), out_write(out_pipe[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_read.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_write.get(), STDOUT_FILENO);

  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(),
                                environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw OracleProcessFailure(context + ": cannot start '" + argv[0] +
                               "': " + std::strerror(rc));
  }
  in_read.Close();
  out_write.Close();

  // A child that exits without reading stdin is reported via its status.
  size_t written = 0;
  while (written < input.size()) {
    const ssize_t k =
        ::write(in_write.get(), input.data() + written, input.size() - written);
    if (k < 0) {
      if (errno == EINTR) continue;
      break;
    }
    written += static_cast<size_t>(k);
  }
  in_write.Close();

  ProcessResult result;
  char buffer[4096];
  while (true) {
    const ssize_t k = ::read(out_read.get(), buffer, sizeof(buffer));
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) break;
    result.out.append(buffer, static_cast<size_t>(k));
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.status = status;
  return result;
}

}  // namespace

CommandOracle::CommandOracle(std::vector<std::string> argv,
                             std::vector<std::string> names,
                             std::filesystem::path cache_path)
    : ValueOracle(std::move(names)),
      argv_(std::move(argv)),
      cache_path_(std::move(cache_path)) {
  if (argv_.empty() || argv_[0].empty()) {
    throw BadSpec("oracle command is empty");
  }
  // Validates the roster.
  const Game roster(player_names(), {});
  IgnoreSigpipeOnce();
  if (!cache_path_.empty() && std::filesystem::exists(cache_path_)) {
    const Game cached = LoadGame(cache_path_);
    if (cached.names() != player_names()) {
      throw LoadError("cache file " + cache_path_.string() +
                      " was written for a different roster");
    }
    for (const auto& [s, v] : cached.values()) Preload(s, v);
  }
}

CommandOracle::~CommandOracle() {
  try {
    Flush();
  } catch (...) {
  }
}

void CommandOracle::Flush() {
  if (cache_path_.empty()) return;
  std::lock_guard<std::mutex> lock(flush_mu_);
  SaveGame(Game(player_names(), KnownValues()), cache_path_);
}

std::string CommandOracle::Describe(Coalition s) const {
  std::string label = "{";
  bool first = true;
  for (int i : s.Members()) {
    if (!first) label += ',';
    label += i < num_players() ? player_names()[i] : "#" + std::to_string(i);
    first = false;
  }
  return label + "}";
}

double CommandOracle::Evaluate(Coalition s) {
  const std::string context = "oracle for coalition " + Describe(s);
  if (!s.IsSubsetOf(Coalition::Grand(num_players()))) {
    throw OracleMiss(context + ": player index out of range");
  }
  nlohmann::json request;
  request["players"] = nlohmann::json::array();
  for (int i : s.Members()) request["players"].push_back(player_names()[i]);

  const ProcessResult result = RunProcess(argv_, request.dump() + "\n", context);
  if (!WIFEXITED(result.status)) {
    throw OracleProcessFailure(context + ": command terminated abnormally");
  }
  if (WEXITSTATUS(result.status) != 0) {
    throw OracleProcessFailure(context + ": command exited with status " +
                               std::to_string(WEXITSTATUS(result.status)));
  }
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(result.out);
  } catch (const nlohmann::json::exception&) {
    throw OracleProcessFailure(context + ": malformed output '" + result.out +
                               "'");
  }
  if (!response.is_object() || !response.contains("value") ||
      !response["value"].is_number()) {
    throw OracleProcessFailure(context + ": output lacks a numeric 'value'");
  }
  const double value = response["value"].get<double>();
  if (!std::isfinite(value)) {
    throw OracleProcessFailure(context + ": non-finite value");
  }
  return value;
}

// ---------------------------------------------------------------------------
// Synthetic games

namespace {

// Uniform in [0, 1) from the raw engine output; avoids the
// implementation-defined std::uniform_real_distribution.
double NextUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    parts.push_back(TrimView(s.substr(start, pos == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double ParseDouble(std::string_view text, std::string_view what) {
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw BadSpec("bad number '" + std::string(text) + "' for " +
                  std::string(what));
  }
  return value;
}

int64_t ParseInt(std::string_view text, std::string_view what) {
  int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw BadSpec("bad integer '" + std::string(text) + "' for " +
                  std::string(what));
  }
  return value;
}

}  // namespace

SyntheticSpec RandomCoverageSpec(int n, uint64_t seed, double alpha,
                                 int num_items, double density) {
  if (n < 1 || n > kMaxPlayers) throw BadSpec("coverage needs 1 <= n <= 64");
  if (num_items <= 0) num_items = std::max(4, 2 * n);
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kCoverage;
  spec.seed = seed;
  spec.alpha = alpha;
  spec.items.assign(n, {});
  std::mt19937_64 rng(seed);
  for (int item = 0; item < num_items; ++item) {
    spec.item_weights.push_back(0.5 + NextUnit(rng));
    const int owner = static_cast<int>(rng() % static_cast<uint64_t>(n));
    for (int p = 0; p < n; ++p) {
      if (p == owner || NextUnit(rng) < density) spec.items[p].push_back(item);
    }
  }
  return spec;
}

ParsedSynthetic ParseSyntheticSpec(std::string_view text) {
  const size_t colon = text.find(':');
  const std::string_view kind = TrimView(text.substr(0, colon));
  const std::string_view body =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  ParsedSynthetic parsed;

  if (kind == "additive") {
    parsed.spec.kind = SyntheticKind::kAdditive;
    for (std::string_view w : Split(body, ',')) {
      parsed.spec.weights.push_back(ParseDouble(w, "additive weight"));
    }
    parsed.num_players = static_cast<int>(parsed.spec.weights.size());
    return parsed;
  }

  std::unordered_map<std::string, std::string> params;
  for (std::string_view part : Split(body, ';')) {
    if (part.empty()) continue;
    const size_t eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw BadSpec("expected key=value in '" + std::string(part) + "'");
    }
    params[std::string(TrimView(part.substr(0, eq)))] =
        std::string(TrimView(part.substr(eq + 1)));
  }
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    std::string value = it->second;
    params.erase(it);
    return value;
  };
  const std::optional<std::string> n_text = take("n");
  if (!n_text) throw BadSpec(std::string(kind) + " spec needs n=<players>");
  const int64_t n = ParseInt(*n_text, "n");
  if (n < 1 || n > kMaxPlayers) throw BadSpec("n must be in [1, 64]");
  parsed.num_players = static_cast<int>(n);

  if (kind == "unanimity") {
    parsed.spec.kind = SyntheticKind::kUnanimity;
    const std::optional<std::string> carrier = take("carrier");
    if (!carrier) throw BadSpec("unanimity spec needs carrier=<names>");
    const Game roster(DefaultPlayerNames(parsed.num_players), {});
    try {
      parsed.spec.carrier = roster.ParseKey(*carrier);
    } catch (const UnknownPlayer& e) {
      throw BadSpec(std::string("carrier: ") + e.what());
    }
  } else if (kind == "coverage") {
    const std::optional<std::string> seed = take("seed");
    const std::optional<std::string> alpha = take("alpha");
    const std::optional<std::string> items = take("items");
    const std::optional<std::string> density = take("density");
    parsed.spec = RandomCoverageSpec(
        parsed.num_players,
        seed ? static_cast<uint64_t>(ParseInt(*seed, "seed")) : 0,
        alpha ? ParseDouble(*alpha, "alpha") : 1.0,
        items ? static_cast<int>(ParseInt(*items, "items")) : 0,
        density ? ParseDouble(*density, "density") : 0.25);
  } else {
    throw BadSpec("unknown synthetic kind '" + std::string(kind) + "'");
  }
  if (!params.empty()) {
    throw BadSpec("unknown parameter '" + params.begin()->first + "'");
  }
  // Validate against n now rather than at oracle construction.
  SyntheticOracle check(parsed.spec, parsed.num_players);
  return parsed;
}

SyntheticOracle::SyntheticOracle(const SyntheticSpec& spec, int n)
    : ValueOracle(DefaultPlayerNames(n)), spec_(spec) {
  if (n < 1 || n > kMaxPlayers) throw BadSpec("n must be in [1, 64]");
  switch (spec_.kind) {
    case SyntheticKind::kAdditive:
      if (static_cast<int>(spec_.weights.size()) != n) {
        throw BadSpec("additive spec has " +
                      std::to_string(spec_.weights.size()) + " weights for " +
                      std::to_string(n) + " players");
      }
      for (double w : spec_.weights) {
        if (!std::isfinite(w)) throw BadSpec("additive weights must be finite");
      }
      break;
    case SyntheticKind::kUnanimity:
      if (spec_.carrier.empty() ||
          !spec_.carrier.IsSubsetOf(Coalition::Grand(n))) {
        throw BadSpec("unanimity carrier must be a nonempty subset of players");
      }
      break;
    case SyntheticKind::kCoverage: {
      if (static_cast<int>(spec_.items.size()) != n) {
        throw BadSpec("coverage spec lists items for " +
                      std::to_string(spec_.items.size()) + " players, need " +
                      std::to_string(n));
      }
      if (!(spec_.alpha > 0 && spec_.alpha <= 1)) {
        throw BadSpec("coverage alpha must be in (0, 1]");
      }
      int num_items = 0;
      for (const auto& held : spec_.items) {
        for (int item : held) {
          if (item < 0) throw BadSpec("coverage item ids must be >= 0");
          num_items = std::max(num_items, item + 1);
        }
      }
      if (!spec_.item_weights.empty() &&
          static_cast<int>(spec_.item_weights.size()) < num_items) {
        throw BadSpec("coverage item_weights does not cover every item id");
      }
      item_weight_.assign(num_items, 1.0);
      for (int item = 0; item < num_items && !spec_.item_weights.empty();
           ++item) {
        const double w = spec_.item_weights[item];
        if (!std::isfinite(w) || w < 0) {
          throw BadSpec("coverage item weights must be finite and >= 0");
        }
        item_weight_[item] = w;
      }
      const size_t words = (static_cast<size_t>(num_items) + 63) / 64;
      item_masks_.assign(n, std::vector<uint64_t>(words, 0));
      std::vector<bool> held_by_someone(num_items, false);
      for (int p = 0; p < n; ++p) {
        for (int item : spec_.items[p]) {
          item_masks_[p][item / 64] |= uint64_t{1} << (item % 64);
          held_by_someone[item] = true;
        }
      }
      // Normalizer: every item some player holds, so that v(D) = 1.
      for (int item = 0; item < num_items; ++item) {
        if (held_by_someone[item]) total_item_weight_ += item_weight_[item];
      }
      if (!(total_item_weight_ > 0)) {
        throw BadSpec("coverage spec has zero total item weight");
      }
      break;
    }
  }
}

double SyntheticOracle::ValueFor(Coalition s) const {
  const int n = num_players();
  if (!s.IsSubsetOf(Coalition::Grand(n))) {
    throw OracleMiss("coalition bitmask " + std::to_string(s.bits()) +
                     " exceeds " + std::to_string(n) + " players");
  }
  switch (spec_.kind) {
    case SyntheticKind::kAdditive: {
      double sum = 0;
      for (int i : s.Members()) sum += spec_.weights[i];
      return sum;
    }
    case SyntheticKind::kUnanimity:
      return spec_.carrier.IsSubsetOf(s) ? 1.0 : 0.0;
    case SyntheticKind::kCoverage: {
      if (s.empty()) return 0.0;
      const size_t words = item_weight_.empty() ? 0 : item_masks_[0].size();
      std::vector<uint64_t> covered(words, 0);
      for (int i : s.Members()) {
        for (size_t w = 0; w < words; ++w) covered[w] |= item_masks_[i][w];
      }
      double weight = 0;
      for (size_t w = 0; w < words; ++w) {
        for (uint64_t rest = covered[w]; rest != 0; rest &= rest - 1) {
          weight += item_weight_[w * 64 + std::countr_zero(rest)];
        }
      }
      return std::pow(weight / total_item_weight_, spec_.alpha);
    }
  }
  return 0.0;
}

Game MaterializeGame(ValueOracle& oracle,
                     std::optional<std::vector<double>> weights) {
  const int n = oracle.num_players();
  if (n > 24) {
    throw TooManyPlayers("complete tables are limited to 24 players, got " +
                         std::to_string(n));
  }
  Game::ValueTable values;
  const uint64_t limit = uint64_t{1} << n;
  for (uint64_t bits = 1; bits < limit; ++bits) {
    values.emplace_hint(values.end(), Coalition(bits),
                        oracle.Query(Coalition(bits)));
  }
  return Game(oracle.player_names(), std::move(values), std::move(weights));
}

}  // namespace coalition_ledger
