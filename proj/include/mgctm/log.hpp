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

#include <functional>
#include <string>

// Minimal diagnostic channel. Defaults to stderr; tests and the CLI may
// redirect or silence it.
namespace mgctm::log {

using Sink = std::function<void(const std::string&)>;

void set_sink(Sink sink);
void warn(const std::string& message);
void info(const std::string& message);

}  // namespace mgctm::log
