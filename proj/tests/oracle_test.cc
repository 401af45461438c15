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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "coalition_ledger/errors.h"
#include "doctest.h"
#include "support/oracles.h"
#include "support/temp_dir.h"

namespace coalition_ledger {
namespace {

namespace fs = std::filesystem;

using testing::TempDir;

TEST_CASE("table oracle serves stored values and memoizes") {
  TableOracle oracle(testing::HeartDiseaseGame());
  CHECK(oracle.Query(Coalition(0b110)) == 0.8214);
  CHECK(oracle.trials_used() == 1);
  CHECK(oracle.Query(Coalition()) == 0.0);
  CHECK(oracle.trials_used() == 1);
  CHECK(oracle.Query(Coalition(0b110)) == 0.8214);
  CHECK(oracle.trials_used() == 1);
  CHECK_THROWS_AS(oracle.Query(Coalition(0b1111)), OracleMiss);
  CHECK(oracle.trials_used() == 1);
}

TEST_CASE("table oracle misses are errors") {
  Game::ValueTable values = testing::HeartDiseaseGame().values();
  values.erase(Coalition(0b011));
  TableOracle oracle(testing::HeartDiseaseGame().WithValues(values));
  CHECK_THROWS_AS(oracle.Query(Coalition(0b011)), OracleMiss);
}

TEST_CASE("trials_used counts distinct coalitions under concurrency") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kAdditive;
  spec.weights = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  SyntheticOracle oracle(spec, 6);
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&oracle, t] {
      std::mt19937_64 rng(t);
      for (int q = 0; q < 500; ++q) oracle.Query(Coalition(rng() % 64));
    });
  }
  for (auto& w : workers) w.join();
  std::set<uint64_t> distinct;
  for (int t = 0; t < 8; ++t) {
    std::mt19937_64 rng(t);
    for (int q = 0; q < 500; ++q) {
      const uint64_t s = rng() % 64;
      if (s != 0) distinct.insert(s);
    }
  }
  CHECK(oracle.trials_used() == static_cast<int64_t>(distinct.size()));
}

TEST_CASE("synthetic additive and unanimity games") {
  SyntheticSpec additive;
  additive.weights = {0.2, 0.3, 0.5};
  SyntheticOracle add(additive, 3);
  CHECK(add.Query(Coalition(0b101)) == doctest::Approx(0.7).epsilon(1e-15));

  SyntheticSpec unanimity;
  unanimity.kind = SyntheticKind::kUnanimity;
  unanimity.carrier = Coalition(0b011);
  SyntheticOracle una(unanimity, 3);
  CHECK(una.Query(Coalition(0b001)) == 0.0);
  CHECK(una.Query(Coalition(0b111)) == 1.0);
}

TEST_CASE("coverage game by hand") {
  // a:{1,2}, b:{2,3}, c:{3}; unit weights; alpha = 1.
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kCoverage;
  spec.items = {{1, 2}, {2, 3}, {3}};
  spec.alpha = 1.0;
  SyntheticOracle oracle(spec, 3);
  CHECK(oracle.Query(Coalition(0b011)) == doctest::Approx(1.0));
  CHECK(oracle.Query(Coalition(0b001)) == doctest::Approx(2.0 / 3.0));
  CHECK(oracle.Query(Coalition(0b100)) == doctest::Approx(1.0 / 3.0));
  CHECK(oracle.Query(Coalition(0b111)) == 1.0);
}

TEST_CASE("synthetic specs are validated") {
  SyntheticSpec additive;
  additive.weights = {0.2, 0.3};
  CHECK_THROWS_AS(SyntheticOracle(additive, 3), BadSpec);
  SyntheticSpec unanimity;
  unanimity.kind = SyntheticKind::kUnanimity;
  unanimity.carrier = Coalition(0b1000);
  CHECK_THROWS_AS(SyntheticOracle(unanimity, 3), BadSpec);
  SyntheticSpec coverage = RandomCoverageSpec(4, 1, 0.5);
  coverage.alpha = 1.5;
  CHECK_THROWS_AS(SyntheticOracle(coverage, 4), BadSpec);
  CHECK_THROWS_AS(SyntheticOracle(RandomCoverageSpec(4, 1, 0.5), 5), BadSpec);
}

TEST_CASE("synthetic spec text forms") {
  const ParsedSynthetic add = ParseSyntheticSpec("additive:0.2,0.3,0.5");
  CHECK(add.num_players == 3);
  CHECK(add.spec.weights == std::vector<double>{0.2, 0.3, 0.5});
  const ParsedSynthetic una = ParseSyntheticSpec("unanimity:n=4;carrier=a,b");
  CHECK(una.num_players == 4);
  CHECK(una.spec.carrier == Coalition(0b0011));
  const ParsedSynthetic cov =
      ParseSyntheticSpec("coverage:n=10;seed=7;alpha=0.5");
  CHECK(cov.num_players == 10);
  CHECK(cov.spec.alpha == 0.5);
  CHECK(cov.spec.items == RandomCoverageSpec(10, 7, 0.5).items);
  CHECK_THROWS_AS(ParseSyntheticSpec("banzhaf:n=3"), BadSpec);
  CHECK_THROWS_AS(ParseSyntheticSpec("coverage:seed=1"), BadSpec);
  CHECK_THROWS_AS(ParseSyntheticSpec("coverage:n=3;bogus=1"), BadSpec);
  CHECK_THROWS_AS(ParseSyntheticSpec("additive:0.2,x"), BadSpec);
  CHECK_THROWS_AS(ParseSyntheticSpec("unanimity:n=3;carrier=z"), BadSpec);
}

TEST_CASE("same coverage seed gives the same value function") {
  const SyntheticSpec first = RandomCoverageSpec(9, 1234, 0.7);
  const SyntheticSpec second = RandomCoverageSpec(9, 1234, 0.7);
  SyntheticOracle a(first, 9), b(second, 9);
  for (uint64_t s = 1; s < 512; ++s) {
    CHECK(a.ValueFor(Coalition(s)) == b.ValueFor(Coalition(s)));
  }
  CHECK(a.ValueFor(Coalition::Grand(9)) == 1.0);
}

TEST_CASE("coverage games are monotone") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const double alpha = 0.1 + 0.9 * static_cast<double>(rng() % 1000) / 1000;
    SyntheticOracle oracle(RandomCoverageSpec(n, rng(), alpha), n);
    const uint64_t limit = uint64_t{1} << n;
    std::vector<double> v(limit);
    for (uint64_t s = 0; s < limit; ++s) v[s] = oracle.ValueFor(Coalition(s));
    CHECK(v[limit - 1] == doctest::Approx(1.0).epsilon(1e-15));
    bool monotone = true;
    for (uint64_t t = 0; t < limit; ++t) {
      // Every subset s of t.
      for (uint64_t s = t;; s = (s - 1) & t) {
        if (v[s] > v[t]) monotone = false;
        if (s == 0) break;
      }
    }
    CHECK(monotone);
  }
}

TEST_CASE("command oracle protocol and caching") {
  TempDir dir;
  const fs::path request = dir.path() / "request.txt";
  const fs::path stub = dir.Script(
      "stub.sh", "cat > '" + request.string() + "'\necho '{\"value\": 0.25}'");
  const fs::path cache = dir.path() / "cache.json";
  {
    CommandOracle oracle({stub.string()}, {"a", "b", "c"}, cache);
    CHECK(oracle.Query(Coalition(0b001)) == 0.25);
    CHECK(oracle.trials_used() == 1);
    CHECK(oracle.Query(Coalition(0b001)) == 0.25);
    CHECK(oracle.trials_used() == 1);

    oracle.Query(Coalition(0b101));
    std::ifstream in(request);
    std::string line;
    std::getline(in, line);
    CHECK(line == R"({"players":["a","c"]})");
    oracle.Flush();
  }
  const Game cached = LoadGame(cache);
  CHECK(cached.values().size() == 2);
  CHECK(*ValueOf(cached, Coalition(0b101)) == 0.25);

  // Reloading the cache serves earlier coalitions without new trials.
  fs::remove(request);
  CommandOracle reloaded({stub.string()}, {"a", "b", "c"}, cache);
  CHECK(reloaded.Query(Coalition(0b001)) == 0.25);
  CHECK(reloaded.Query(Coalition(0b101)) == 0.25);
  CHECK(reloaded.trials_used() == 0);
  CHECK_FALSE(fs::exists(request));

  CHECK_THROWS_AS(CommandOracle({stub.string()}, {"x", "y", "z"}, cache),
                  LoadError);
}

TEST_CASE("command oracle passes fixed arguments") {
  TempDir dir;
  const fs::path stub = dir.Script("echo_arg.sh",
                                   "cat > /dev/null\necho \"{\\\"value\\\": $1}\"");
  CommandOracle oracle({stub.string(), "0.125"}, {"a", "b"});
  CHECK(oracle.Query(Coalition(0b11)) == 0.125);
}

TEST_CASE("command oracle failures name the coalition") {
  TempDir dir;
  auto failure_message = [&](const std::string& body) {
    const fs::path stub = dir.Script("fail.sh", body);
    CommandOracle oracle({stub.string()}, {"a", "b", "c"});
    try {
      oracle.Query(Coalition(0b001));
    } catch (const OracleProcessFailure& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string exit_one = failure_message("cat > /dev/null\nexit 1");
  CHECK(exit_one.find("{a}") != std::string::npos);
  CHECK(exit_one.find("status 1") != std::string::npos);
  CHECK(failure_message("echo 'not json'").find("malformed") !=
        std::string::npos);
  CHECK(failure_message("echo '{\"val\": 1}'").find("value") !=
        std::string::npos);
  CHECK(failure_message("echo '{\"value\": 1e999}'") != "no error");
  CHECK(failure_message("exit 0") != "no error");

  CommandOracle missing({(dir.path() / "absent").string()}, {"a"});
  CHECK_THROWS_AS(missing.Query(Coalition(1)), OracleProcessFailure);
}

TEST_CASE("command oracle spawns in parallel safely") {
  TempDir dir;
  const fs::path stub = dir.Script(
      "sum.sh",
      "read line\ncount=$(echo \"$line\" | tr -cd ',' | wc -c)\n"
      "echo \"{\\\"value\\\": $((count + 1))}\"");
  CommandOracle oracle({stub.string()}, {"a", "b", "c", "d"});
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&oracle] {
      for (uint64_t s = 1; s < 16; ++s) oracle.Query(Coalition(s));
    });
  }
  for (auto& w : workers) w.join();
  CHECK(oracle.trials_used() == 15);
  for (uint64_t s = 1; s < 16; ++s) {
    CHECK(oracle.Query(Coalition(s)) == Coalition(s).size());
  }
}

TEST_CASE("materialize builds the complete table") {
  SyntheticOracle oracle(RandomCoverageSpec(5, 3, 0.5), 5);
  const Game game = MaterializeGame(oracle);
  CHECK(ValidateComplete(game));
  CHECK(oracle.trials_used() == 31);
}

}  // namespace
}  // namespace coalition_ledger
