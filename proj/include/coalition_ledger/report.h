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

#ifndef COALITION_LEDGER_REPORT_H_
#define COALITION_LEDGER_REPORT_H_

#include <string>

#include "coalition_ledger/allocator.h"
#include "json.hpp"

namespace coalition_ledger {

// Report layout:
//   {"players": [...], "v_grand": x,
//    "methods": {"least_core": {"phi": {name: x}, "e_star": x}, ...},
//    "deficits": {key: x}, "binding": [key, ...],
//    "comparison": [{"first", "second", "cosine", "max_abs_diff"}],
//    "evaluated_count": N}
// Numbers are written at full (round-trip) precision.
nlohmann::ordered_json ReportToJson(const AllocationReport& report);

// Reads back the players, v_grand, allocations, e_star and evaluated_count.
// Deficits and binding rows are not restored. Throws LoadError.
AllocationReport ReportFromJson(const nlohmann::json& doc);

// Human-readable rendering with six decimals.
std::string ReportToTable(const AllocationReport& report);

}  // namespace coalition_ledger

#endif  // COALITION_LEDGER_REPORT_H_
