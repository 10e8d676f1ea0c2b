// Copyright 2026 The R1SMG Authors
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

#ifndef R1SMG_TOOLS_CLI_H_
#define R1SMG_TOOLS_CLI_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace r1smg::tools {

inline constexpr uint64_t kDefaultSeed = 1;
inline constexpr char kSeedEnvVar[] = "R1SMG_SEED";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

int ExitCodeForStatus(const absl::Status& status);

// args excludes the program name. Regular output goes to `out`, diagnostics
// to `err`. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace r1smg::tools

#endif  // R1SMG_TOOLS_CLI_H_
