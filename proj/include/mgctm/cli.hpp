// Copyright 2026 The MGCTM Authors.
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

#pragma once

// Command-line front end: train, eval, topics, synth, bench.
//
// Exit codes: 0 success, 1 runtime failure (I/O, numerical), 2 usage or
// validation error (nothing is written), 3 bench finished with failed
// rows.

#include <ostream>
#include <string>
#include <vector>

namespace mgctm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;

// `args` excludes the program name. Diagnostics go to `err`, results and
// traces to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgctm::cli
