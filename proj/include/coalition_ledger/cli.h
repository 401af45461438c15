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

#ifndef COALITION_LEDGER_CLI_H_
#define COALITION_LEDGER_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coalition_ledger/allocator.h"
#include "coalition_ledger/pruner.h"

namespace coalition_ledger {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitOracle = 3;
inline constexpr int kExitSolver = 4;

enum class OutputFormat { kJson, kTable };

struct RunConfig {
  // Exactly one value source: a game file, an external command, or a
  // synthetic spec.
  std::optional<std::filesystem::path> game_path;
  std::vector<std::string> oracle_command;
  std::optional<std::filesystem::path> cache_path;
  std::vector<std::string> players;  // roster for the command oracle
  std::optional<std::string> synthetic;

  std::optional<double> t1;
  std::optional<double> t2;
  std::optional<std::string> preset;  // exact | balanced | coarse

  std::vector<Method> methods = {Method::kLeastCore};
  bool full = false;
  OutputFormat format = OutputFormat::kJson;
  std::optional<std::filesystem::path> output;
  std::vector<std::filesystem::path> inputs;  // compare only
  int threads = 1;
};

struct Thresholds {
  double t1 = 0;
  double t2 = 0;
};

// Preset values, overridden by explicit t1 / t2. Throws BadSpec.
Thresholds ResolveThresholds(const RunConfig& config);

// Pruning (unless `full`), then every requested method.
AllocationReport BuildSolveReport(const RunConfig& config);

struct PruneRun {
  std::vector<std::string> players;
  PruneConfig config;
  EvaluationLog log;
};

PruneRun RunPrune(const RunConfig& config);

// Subcommands. Each writes its result to `out` (or config.output) and, on
// failure, a one-line JSON error object to `err`; the return value is the
// process exit code.
int CmdSolve(const RunConfig& config, std::ostream& out, std::ostream& err);
int CmdPrune(const RunConfig& config, std::ostream& out, std::ostream& err);
int CmdCompare(const RunConfig& config, std::ostream& out, std::ostream& err);
int CmdValidate(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses `args` (without the program name) and dispatches.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_CLI_H_
