// Copyright 2026 The piecefit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command surface of the pf tool, callable in-process for tests.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pf/model.hpp"

namespace pf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitIo = 4;

/// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from PF_WORKERS, or 1 when unset or malformed.
int default_workers();

/// Arrangement stored in a solve report.
Arrangement read_report_arrangement(const std::filesystem::path& path);

}  // namespace pf::cli
