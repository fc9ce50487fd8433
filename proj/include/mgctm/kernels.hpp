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

// Dense double-precision kernels used by the inner loops of the model,
// the baselines and the metrics. Every kernel has a scalar reference
// version and an AVX2+FMA version; the active one is picked at runtime
// from CPUID and can be pinned with set_isa() or MGCTM_ISA=scalar.
//
// The two versions agree to rounding (summation order differs); a given
// process always uses one of them, so results stay reproducible.

#include <span>

namespace mgctm::kernels {

enum class Isa { kScalar, kAvx2 };

bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
// Throws ConfigError when the CPU lacks `isa`.
void set_isa(Isa isa);
const char* isa_name(Isa isa) noexcept;

// Preconditions shared by all kernels: paired spans have equal size.
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
// x must be non-empty.
double max_value(std::span<const double> x);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
// out = a + b
void add(std::span<const double> a, std::span<const double> b,
         std::span<double> out);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double max_value(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
void add(std::span<const double> a, std::span<const double> b,
         std::span<double> out);
}  // namespace scalar

// Only callable when isa_supported(Isa::kAvx2).
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double max_value(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
void add(std::span<const double> a, std::span<const double> b,
         std::span<double> out);
}  // namespace avx2

}  // namespace mgctm::kernels
