/*
 Copyright 2026 The aniso authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ANISO_CLI_HPP
#define ANISO_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace aniso::cli {

// Exit codes: 0 success / feasible, 2 infeasible (or reports differ for
// `compare`), 1 any error.
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kSuccess = 0, kError = 1, kInfeasible = 2 };

// Runs `aniso <command> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aniso::cli

#endif
