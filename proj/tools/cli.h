// Copyright 2026 The DP Sketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSKETCH_TOOLS_CLI_H_
#define DPSKETCH_TOOLS_CLI_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace dpsketch::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnreadable = 3;
inline constexpr int kExitIncompatible = 4;
inline constexpr int kExitAlreadyPrivate = 5;

// Runs one command. `args` excludes the program name. Item streams read
// from "-" come from `in`; JSON and CSV go to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err);

// Splits a newline-delimited stream into items. Only the '\n' terminator is
// removed; a final line without one still counts.
std::vector<std::string> SplitLines(std::istream& in);

}  // namespace dpsketch::cli

#endif  // DPSKETCH_TOOLS_CLI_H_
