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

#include "coalition_ledger/report.h"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "coalition_ledger/errors.h"

namespace coalition_ledger {

nlohmann::ordered_json ReportToJson(const AllocationReport& report) {
  const Game roster(report.players, {});
  nlohmann::ordered_json doc;
  doc["players"] = report.players;
  doc["v_grand"] = report.v_grand;

  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const Allocation& allocation : report.allocations) {
    nlohmann::ordered_json entry;
    nlohmann::ordered_json phi = nlohmann::ordered_json::object();
    for (size_t i = 0; i < allocation.phi.size(); ++i) {
      phi[report.players[i]] = allocation.phi[i];
    }
    entry["phi"] = std::move(phi);
    if (allocation.method == Method::kLeastCore && report.least_core) {
      entry["e_star"] = report.least_core->e_star;
    }
    methods[std::string(MethodName(allocation.method))] = std::move(entry);
  }
  doc["methods"] = std::move(methods);

  if (report.least_core) {
    nlohmann::ordered_json deficits = nlohmann::ordered_json::object();
    for (const auto& [s, d] : report.least_core->deficits) {
      deficits[roster.Key(s)] = d;
    }
    doc["deficits"] = std::move(deficits);
    nlohmann::ordered_json binding = nlohmann::ordered_json::array();
    for (Coalition s : report.least_core->binding) {
      binding.push_back(roster.Key(s));
    }
    doc["binding"] = std::move(binding);
  }

  nlohmann::ordered_json comparison = nlohmann::ordered_json::array();
  for (const PairwiseComparison& c : report.comparisons) {
    nlohmann::ordered_json row;
    row["first"] = MethodName(c.first);
    row["second"] = MethodName(c.second);
    row["cosine"] = c.cosine;
    row["max_abs_diff"] = c.max_abs_diff;
    comparison.push_back(std::move(row));
  }
  doc["comparison"] = std::move(comparison);
  doc["evaluated_count"] = report.evaluated_count;
  return doc;
}

AllocationReport ReportFromJson(const nlohmann::json& doc) {
  AllocationReport report;
  try {
    report.players = doc.at("players").get<std::vector<std::string>>();
    report.v_grand = doc.value("v_grand", 0.0);
    report.evaluated_count = doc.value("evaluated_count", int64_t{0});
    const Game roster(report.players, {});
    for (const auto& [name, entry] : doc.at("methods").items()) {
      Allocation allocation;
      allocation.method = ParseMethod(name);
      allocation.phi.assign(report.players.size(), 0.0);
      const auto& phi = entry.at("phi");
      if (phi.size() != report.players.size()) {
        throw LoadError("method '" + name + "' has the wrong number of payoffs");
      }
      for (const auto& [player, value] : phi.items()) {
        const std::optional<int> index = roster.IndexOf(player);
        if (!index) throw LoadError("unknown player '" + player + "' in phi");
        allocation.phi[*index] = value.get<double>();
      }
      if (allocation.method == Method::kLeastCore && entry.contains("e_star")) {
        LeastCoreResult lc;
        lc.allocation = allocation;
        lc.e_star = entry.at("e_star").get<double>();
        report.least_core = std::move(lc);
      }
      report.allocations.push_back(std::move(allocation));
    }
    std::stable_sort(report.allocations.begin(), report.allocations.end(),
                     [](const Allocation& a, const Allocation& b) {
                       return a.method < b.method;
                     });
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string ReportToTable(const AllocationReport& report) {
  const Game roster(report.players, {});
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << std::left << std::setw(16) << "method";
  for (const std::string& name : report.players) {
    out << std::right << std::setw(12) << name;
  }
  out << "\n";
  for (const Allocation& allocation : report.allocations) {
    out << std::left << std::setw(16) << MethodName(allocation.method);
    for (double x : allocation.phi) out << std::right << std::setw(12) << x;
    out << "\n";
  }
  out << "\nv(D) = " << report.v_grand
      << "    evaluated coalitions: " << report.evaluated_count << "\n";
  if (report.least_core) {
    out << "e* = " << report.least_core->e_star << "\n";
    if (!report.least_core->binding.empty()) {
      out << "binding:";
      for (Coalition s : report.least_core->binding) {
        out << " {" << roster.Key(s) << "}";
      }
      out << "\n";
    }
  }
  if (!report.comparisons.empty()) {
    out << "\n"
        << std::left << std::setw(32) << "pair" << std::right << std::setw(12)
        << "cosine" << std::setw(14) << "max|diff|" << "\n";
    for (const PairwiseComparison& c : report.comparisons) {
      out << std::left << std::setw(32)
          << (std::string(MethodName(c.first)) + " vs " +
              std::string(MethodName(c.second)))
          << std::right << std::setw(12) << c.cosine << std::setw(14)
          << c.max_abs_diff << "\n";
    }
  }
  return out.str();
}

}  // namespace coalition_ledger
