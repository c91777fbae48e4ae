// Copyright 2026 The ldpfreq Authors
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


#ifndef LDPFREQ_CLI_H_
#define LDPFREQ_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace ldpfreq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
// Bad input data, a failed computation, or a failed verification.
inline constexpr int kExitData = 2;

// Entry point of the `ldpfreq` tool. `args` excludes the program name.
// Subcommands: estimate, simulate, sweep, ibu-convergence, verify.
int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ldpfreq

#endif  // LDPFREQ_CLI_H_
