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

#ifndef COALITION_LEDGER_TESTS_SUPPORT_TEMP_DIR_H_
#define COALITION_LEDGER_TESTS_SUPPORT_TEMP_DIR_H_

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <string>

namespace coalition_ledger::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() /
                           "coalition_ledger_XXXXXX")
                              .string();
    path_ = ::mkdtemp(pattern.data());
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  // Writes an executable /bin/sh script.
  std::filesystem::path Script(const std::string& name,
                               const std::string& body) const {
    const std::filesystem::path p = path_ / name;
    std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
    std::filesystem::permissions(p, std::filesystem::perms::owner_all);
    return p;
  }

  std::filesystem::path Write(const std::string& name,
                              const std::string& body) const {
    const std::filesystem::path p = path_ / name;
    std::ofstream(p) << body;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace coalition_ledger::testing

#endif  // COALITION_LEDGER_TESTS_SUPPORT_TEMP_DIR_H_
