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

#include "coalition_ledger/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "coalition_ledger/errors.h"
#include "coalition_ledger/oracle.h"
#include "coalition_ledger/report.h"

namespace coalition_ledger {
namespace {

struct ValueSource {
  std::unique_ptr<ValueOracle> oracle;
  std::optional<Game> game;  // set when the source is a game file
  std::optional<std::vector<double>> weights;
};

ValueSource OpenSource(const RunConfig& config) {
  const int configured = (config.game_path ? 1 : 0) +
                         (config.oracle_command.empty() ? 0 : 1) +
                         (config.synthetic ? 1 : 0);
  if (configured != 1) {
    throw BadSpec(
        "configure exactly one of --game, --oracle-cmd or --synthetic");
  }
  ValueSource source;
  if (config.game_path) {
    source.game = LoadGame(*config.game_path);
    source.weights = source.game->weights();
    source.oracle = std::make_unique<TableOracle>(*source.game);
  } else if (!config.oracle_command.empty()) {
    if (config.players.empty()) {
      throw BadSpec("--oracle-cmd needs --players");
    }
    source.oracle = std::make_unique<CommandOracle>(
        config.oracle_command, config.players,
        config.cache_path.value_or(std::filesystem::path()));
  } else {
    const ParsedSynthetic parsed = ParseSyntheticSpec(*config.synthetic);
    source.oracle =
        std::make_unique<SyntheticOracle>(parsed.spec, parsed.num_players);
  }
  return source;
}

void FlushIfCommand(ValueSource& source) {
  if (auto* command = dynamic_cast<CommandOracle*>(source.oracle.get())) {
    command->Flush();
  }
}

double ResolveGrandValue(ValueSource& source) {
  if (source.game) return GrandValue(*source.game);
  return source.oracle->Query(Coalition::Grand(source.oracle->num_players()));
}

void RequireSingletons(const Game& game) {
  for (int i = 0; i < game.num_players(); ++i) {
    if (!game.values().contains(Coalition::Singleton(PlayerId(i)))) {
      throw MissingSingleton("no value for singleton {" + game.names()[i] +
                             "}");
    }
  }
}

// The full table: the file itself, or every coalition from the oracle.
Game CompleteGame(ValueSource& source) {
  if (source.game) {
    if (!ValidateComplete(*source.game)) {
      const auto missing = MissingCoalitions(*source.game);
      throw IncompleteTable("game table is missing " +
                            std::to_string(missing.size()) +
                            " coalitions, first {" +
                            source.game->Key(missing.front()) + "}");
    }
    return *source.game;
  }
  return MaterializeGame(*source.oracle, source.weights);
}

// Grand coalition and every D \ {i}.
Game LeaveOneOutGame(ValueSource& source) {
  if (source.game) return *source.game;
  ValueOracle& oracle = *source.oracle;
  const Coalition grand = Coalition::Grand(oracle.num_players());
  Game::ValueTable values;
  values.emplace(grand, oracle.Query(grand));
  for (int i = 0; i < oracle.num_players(); ++i) {
    const Coalition rest = grand.Without(PlayerId(i));
    if (!rest.empty()) values.emplace(rest, oracle.Query(rest));
  }
  return Game(oracle.player_names(), std::move(values), source.weights);
}

int ThreadsFromEnv() {
  const char* text = std::getenv("COALITION_LEDGER_THREADS");
  if (text == nullptr || *text == '\0') return 1;
  char* end = nullptr;
  const long value = std::strtol(text, &end, 10);
  if (*end != '\0' || value < 1) {
    throw BadSpec("COALITION_LEDGER_THREADS must be a positive integer");
  }
  return static_cast<int>(std::min(value, 256L));
}

int ExitCodeFor(ErrorClass error_class) {
  switch (error_class) {
    case ErrorClass::kValidation:
      return kExitValidation;
    case ErrorClass::kOracle:
      return kExitOracle;
    case ErrorClass::kSolver:
      return kExitSolver;
  }
  return kExitValidation;
}

int ReportError(std::ostream& err, std::string_view kind,
                std::string_view message, int code) {
  nlohmann::ordered_json doc;
  doc["error"] = kind;
  doc["message"] = message;
  doc["exit_code"] = code;
  err << doc.dump() << "\n";
  return code;
}

// Runs `body`, translating library errors into exit codes.
template <typename Body>
int Guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return ReportError(err, e.kind(), e.what(), ExitCodeFor(e.error_class()));
  } catch (const nlohmann::json::exception& e) {
    return ReportError(err, "LoadError", e.what(), kExitValidation);
  }
}

void Emit(const RunConfig& config, std::ostream& out,
          const std::string& text) {
  if (config.output) {
    WriteFileAtomically(*config.output, text);
  } else {
    out << text;
  }
}

std::vector<std::string> SplitWords(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string word; in >> word;) words.push_back(word);
  return words;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string::npos) {
      items.push_back(item.substr(first, last - first + 1));
    }
  }
  return items;
}

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str(), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace

Thresholds ResolveThresholds(const RunConfig& config) {
  Thresholds t;
  if (config.preset) {
    if (*config.preset == "exact") {
      t = {0.0, 0.0};
    } else if (*config.preset == "balanced") {
      t = {0.1, 0.1};
    } else if (*config.preset == "coarse") {
      t = {0.15, 0.15};
    } else {
      throw BadSpec("unknown preset '" + *config.preset + "'");
    }
  }
  if (config.t1) t.t1 = *config.t1;
  if (config.t2) t.t2 = *config.t2;
  if (!std::isfinite(t.t1) || !std::isfinite(t.t2) || t.t1 < 0 || t.t2 < 0) {
    throw BadSpec("thresholds must be finite and non-negative");
  }
  return t;
}

AllocationReport BuildSolveReport(const RunConfig& config) {
  const Thresholds thresholds = ResolveThresholds(config);
  ValueSource source = OpenSource(config);
  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  if (methods.empty()) throw BadSpec("no methods requested");

  std::vector<Allocation> allocations;
  std::optional<LeastCoreResult> least_core;
  int64_t evaluated_count = 0;
  try {
    for (Method method : methods) {
      switch (method) {
        case Method::kLeastCore: {
          if (source.game) RequireSingletons(*source.game);
          const double v_grand = ResolveGrandValue(source);
          Game fragment = [&] {
            if (config.full) {
              Game complete = CompleteGame(source);
              evaluated_count =
                  static_cast<int64_t>(complete.values().size()) -
                  (complete.values().contains(complete.grand()) ? 1 : 0);
              return complete;
            }
            EvaluationLog log;
            Game pruned = PruneEnumerate(
                *source.oracle, {thresholds.t1, thresholds.t2, v_grand}, log,
                config.threads);
            evaluated_count = log.evaluated_count();
            return pruned;
          }();
          least_core = SolveLeastCore(fragment, v_grand);
          allocations.push_back(least_core->allocation);
          break;
        }
        case Method::kShapley:
          allocations.push_back(ShapleyExact(CompleteGame(source)));
          break;
        case Method::kLeaveOneOut:
          allocations.push_back(LeaveOneOut(LeaveOneOutGame(source)));
          break;
        case Method::kProportional: {
          if (source.game) {
            allocations.push_back(Proportional(*source.game));
          } else {
            throw MissingWeights(
                "proportional allocation needs a game file with weights");
          }
          break;
        }
      }
    }
  } catch (...) {
    FlushIfCommand(source);
    throw;
  }
  FlushIfCommand(source);

  AllocationReport report = Compare(allocations);
  report.players = source.oracle->player_names();
  report.v_grand = ResolveGrandValue(source);
  report.least_core = std::move(least_core);
  report.evaluated_count = evaluated_count;
  return report;
}

PruneRun RunPrune(const RunConfig& config) {
  const Thresholds thresholds = ResolveThresholds(config);
  ValueSource source = OpenSource(config);
  PruneRun run;
  run.players = source.oracle->player_names();
  try {
    if (source.game) RequireSingletons(*source.game);
    run.config = {thresholds.t1, thresholds.t2, ResolveGrandValue(source)};
    PruneEnumerate(*source.oracle, run.config, run.log, config.threads);
  } catch (...) {
    FlushIfCommand(source);
    throw;
  }
  FlushIfCommand(source);
  return run;
}

int CmdSolve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const AllocationReport report = BuildSolveReport(config);
    Emit(config, out,
         config.format == OutputFormat::kJson
             ? ReportToJson(report).dump(2) + "\n"
             : ReportToTable(report));
    return kExitOk;
  });
}

int CmdPrune(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const PruneRun run = RunPrune(config);
    if (config.format == OutputFormat::kJson) {
      Emit(config, out, LogToJsonLines(run.log, run.config, run.players));
    } else {
      const nlohmann::json summary = LogSummary(
          run.log, run.config, static_cast<int>(run.players.size()));
      std::ostringstream text;
      for (const auto& [key, value] : summary.items()) {
        text << key << ": " << value.dump() << "\n";
      }
      Emit(config, out, text.str());
    }
    return kExitOk;
  });
}

int CmdCompare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (config.inputs.size() < 2) {
      throw BadSpec("compare needs at least two inputs");
    }
    std::vector<AllocationReport> reports;
    for (const auto& path : config.inputs) {
      const nlohmann::json doc = ReadJsonFile(path);
      if (doc.contains("methods")) {
        reports.push_back(ReportFromJson(doc));
      } else {
        RunConfig per_game = config;
        per_game.game_path = path;
        per_game.oracle_command.clear();
        per_game.synthetic.reset();
        reports.push_back(BuildSolveReport(per_game));
      }
      if (reports.back().players != reports.front().players) {
        throw MismatchedGames(path.string() + " has a different roster than " +
                              config.inputs.front().string());
      }
    }

    nlohmann::ordered_json doc;
    doc["players"] = reports.front().players;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (size_t i = 0; i < reports.size(); ++i) {
      nlohmann::ordered_json entry;
      entry["path"] = config.inputs[i].string();
      entry["report"] = ReportToJson(reports[i]);
      inputs.push_back(std::move(entry));
    }
    doc["inputs"] = std::move(inputs);

    std::ostringstream table;
    table << std::fixed << std::setprecision(6);
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (size_t i = 0; i < reports.size(); ++i) {
      for (size_t j = i + 1; j < reports.size(); ++j) {
        for (const Allocation& a : reports[i].allocations) {
          for (const Allocation& b : reports[j].allocations) {
            if (a.method != b.method) continue;
            const Allocation pair[] = {a, b};
            const AllocationReport cmp = Compare(pair);
            nlohmann::ordered_json row;
            row["first"] = i;
            row["second"] = j;
            row["method"] = MethodName(a.method);
            row["cosine"] = cmp.comparisons.front().cosine;
            row["max_abs_diff"] = cmp.comparisons.front().max_abs_diff;
            if (a.method == Method::kLeastCore && reports[i].least_core &&
                reports[j].least_core) {
              row["delta_e_star"] =
                  reports[i].least_core->e_star - reports[j].least_core->e_star;
            }
            table << "[" << i << "] vs [" << j << "] " << MethodName(a.method)
                  << ": cosine " << cmp.comparisons.front().cosine
                  << ", max|diff| " << cmp.comparisons.front().max_abs_diff;
            if (row.contains("delta_e_star")) {
              table << ", delta e* " << row["delta_e_star"].get<double>();
            }
            table << "\n";
            pairs.push_back(std::move(row));
          }
        }
      }
    }
    doc["comparison"] = std::move(pairs);

    if (config.format == OutputFormat::kJson) {
      Emit(config, out, doc.dump(2) + "\n");
    } else {
      std::ostringstream text;
      for (size_t i = 0; i < reports.size(); ++i) {
        text << "[" << i << "] " << config.inputs[i].string() << "\n"
             << ReportToTable(reports[i]) << "\n";
      }
      Emit(config, out, text.str() + table.str());
    }
    return kExitOk;
  });
}

int CmdValidate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (!config.game_path) throw BadSpec("validate needs --game");
    const Game game = LoadGame(*config.game_path);
    nlohmann::ordered_json doc;
    doc["players"] = game.names();
    doc["entries"] = game.values().size();
    doc["complete"] = ValidateComplete(game);
    doc["has_grand"] = game.values().contains(game.grand());
    nlohmann::ordered_json missing = nlohmann::ordered_json::array();
    for (int i = 0; i < game.num_players(); ++i) {
      if (!game.values().contains(Coalition::Singleton(PlayerId(i)))) {
        missing.push_back(game.names()[i]);
      }
    }
    doc["missing_singletons"] = std::move(missing);
    doc["has_weights"] = game.weights().has_value();
    Emit(config, out, doc.dump(2) + "\n");
    return kExitOk;
  });
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Least-core payoff allocation for coalition games"};
  app.require_subcommand(1);
  RunConfig config;
  std::string game_path, oracle_cmd, cache_path, players, synthetic, preset;
  std::string methods = "least_core", format = "json", output;
  double t1 = 0, t2 = 0;
  std::vector<std::string> inputs;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--game", game_path, "Game file (JSON)");
    sub->add_option("--oracle-cmd", oracle_cmd,
                    "Command that prints {\"value\": x} for a coalition");
    sub->add_option("--cache", cache_path, "Cache file for --oracle-cmd");
    sub->add_option("--players", players, "Comma-separated roster");
    sub->add_option("--synthetic", synthetic,
                    "additive:W,... | unanimity:n=N;carrier=A,B | "
                    "coverage:n=N;seed=S;alpha=A");
  };
  auto add_thresholds = [&](CLI::App* sub) {
    sub->add_option("--t1", t1, "Rule 1 threshold (marginal gain)");
    sub->add_option("--t2", t2, "Rule 2 threshold (gap to v(D))");
    sub->add_option("--preset", preset, "exact | balanced | coarse");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json | table");
    sub->add_option("--out", output, "Output path (default stdout)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Compute allocations");
  add_source(solve);
  add_thresholds(solve);
  add_output(solve);
  solve->add_option("--methods", methods,
                    "least_core,shapley,loo,proportional");
  solve->add_flag("--full", config.full,
                  "Use every coalition of a complete table; no pruning");

  CLI::App* prune = app.add_subcommand("prune", "Run pruned enumeration only");
  add_source(prune);
  add_thresholds(prune);
  add_output(prune);

  CLI::App* compare =
      app.add_subcommand("compare", "Compare reports or games side by side");
  compare->add_option("inputs", inputs, "Report or game files")->required();
  add_thresholds(compare);
  add_output(compare);
  compare->add_option("--methods", methods,
                      "Methods for game inputs (default least_core)");
  compare->add_flag("--full", config.full, "Solve game inputs without pruning");

  CLI::App* validate = app.add_subcommand("validate", "Check a game file");
  validate->add_option("--game", game_path, "Game file (JSON)")->required();

  std::vector<std::string> argv_storage = {"coalition_ledger"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return ReportError(err, "UsageError", e.what(), kExitValidation);
  }

  return Guarded(err, [&] {
    if (!game_path.empty()) config.game_path = game_path;
    if (!oracle_cmd.empty()) config.oracle_command = SplitWords(oracle_cmd);
    if (!cache_path.empty()) config.cache_path = cache_path;
    if (!players.empty()) config.players = SplitList(players);
    if (!synthetic.empty()) config.synthetic = synthetic;
    if (!preset.empty()) config.preset = preset;
    for (CLI::App* sub : {solve, prune, compare}) {
      if (sub->count("--t1") > 0) config.t1 = t1;
      if (sub->count("--t2") > 0) config.t2 = t2;
    }
    config.methods.clear();
    for (const std::string& m : SplitList(methods)) {
      config.methods.push_back(ParseMethod(m));
    }
    if (format == "json") {
      config.format = OutputFormat::kJson;
    } else if (format == "table") {
      config.format = OutputFormat::kTable;
    } else {
      throw BadSpec("unknown format '" + format + "'");
    }
    if (!output.empty()) config.output = output;
    for (const std::string& input : inputs) config.inputs.emplace_back(input);
    config.threads = ThreadsFromEnv();

    if (solve->parsed()) return CmdSolve(config, out, err);
    if (prune->parsed()) return CmdPrune(config, out, err);
    if (compare->parsed()) return CmdCompare(config, out, err);
    return CmdValidate(config, out, err);
  });
}

}  // namespace coalition_ledger
