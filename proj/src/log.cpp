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

#include "mgctm/log.hpp"

#include <iostream>
#include <mutex>

namespace mgctm::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& sink() {
  static Sink s = [](const std::string& msg) { std::cerr << msg << '\n'; };
  return s;
}

void emit(const std::string& msg) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(msg);
}

}  // namespace

void set_sink(Sink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void warn(const std::string& message) { emit("warning: " + message); }
void info(const std::string& message) { emit(message); }

}  // namespace mgctm::log
