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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mgctm/error.hpp"
#include "mgctm/kernels.hpp"

namespace mgctm::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() noexcept {
  const char* forced = std::getenv("MGCTM_ISA");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::kScalar;
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
  return isa == Isa::kScalar || cpu_has_avx2();
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError(std::string("instruction set not supported: ") + isa_name(isa));
  }
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) noexcept {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

#define MGCTM_DISPATCH(call) \
  (active_isa() == Isa::kAvx2 ? avx2::call : scalar::call)

double dot(std::span<const double> a, std::span<const double> b) {
  return MGCTM_DISPATCH(dot(a, b));
}
double squared_distance(std::span<const double> a, std::span<const double> b) {
  return MGCTM_DISPATCH(squared_distance(a, b));
}
double sum(std::span<const double> x) { return MGCTM_DISPATCH(sum(x)); }
double max_value(std::span<const double> x) { return MGCTM_DISPATCH(max_value(x)); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  MGCTM_DISPATCH(axpy(alpha, x, y));
}
void scale(std::span<double> x, double alpha) { MGCTM_DISPATCH(scale(x, alpha)); }
void add(std::span<const double> a, std::span<const double> b,
         std::span<double> out) {
  MGCTM_DISPATCH(add(a, b, out));
}

#undef MGCTM_DISPATCH

}  // namespace mgctm::kernels
