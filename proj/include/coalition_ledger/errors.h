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

#ifndef COALITION_LEDGER_ERRORS_H_
#define COALITION_LEDGER_ERRORS_H_

#include <stdexcept>
#include <string>

namespace coalition_ledger {

// Broad failure classes. The CLI maps each class to an exit code.
enum class ErrorClass {
  kValidation,  // bad input: malformed files, unknown players, missing rows
  kOracle,      // the value source could not produce v(S)
  kSolver,      // the LP could not be certified
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass error_class, std::string kind, const std::string& message)
      : std::runtime_error(message),
        error_class_(error_class),
        kind_(std::move(kind)) {}

  ErrorClass error_class() const { return error_class_; }
  // Stable machine-readable name, e.g. "UnknownPlayer".
  const std::string& kind() const { return kind_; }

 private:
  ErrorClass error_class_;
  std::string kind_;
};

#define COALITION_LEDGER_DEFINE_ERROR(Name, Class)             \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& message)                  \
        : Error(ErrorClass::Class, #Name, message) {}          \
  }

COALITION_LEDGER_DEFINE_ERROR(LoadError, kValidation);
COALITION_LEDGER_DEFINE_ERROR(UnknownPlayer, kValidation);
COALITION_LEDGER_DEFINE_ERROR(BadSpec, kValidation);
COALITION_LEDGER_DEFINE_ERROR(MissingSingleton, kValidation);
COALITION_LEDGER_DEFINE_ERROR(IncompleteTable, kValidation);
COALITION_LEDGER_DEFINE_ERROR(TooManyPlayers, kValidation);
COALITION_LEDGER_DEFINE_ERROR(MissingWeights, kValidation);
COALITION_LEDGER_DEFINE_ERROR(DegenerateWeights, kValidation);
COALITION_LEDGER_DEFINE_ERROR(MismatchedGames, kValidation);
COALITION_LEDGER_DEFINE_ERROR(OracleMiss, kOracle);
COALITION_LEDGER_DEFINE_ERROR(OracleProcessFailure, kOracle);
COALITION_LEDGER_DEFINE_ERROR(NumericalBreakdown, kSolver);
COALITION_LEDGER_DEFINE_ERROR(SolverFailure, kSolver);

#undef COALITION_LEDGER_DEFINE_ERROR

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_ERRORS_H_
