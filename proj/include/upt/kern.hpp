// Copyright 2026 The upt Authors
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

#pragma once

#include <cstddef>
#include <span>

// Arithmetic kernels used by the information measures and the solvers.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the backend is selected once at startup from CPU features and can be
// overridden with the UPT_KERNEL environment variable (scalar | avx2) or
// with set_backend(). The two variants are equivalence-tested; results may
// differ in the last ulps because of reassociation.
namespace upt::kern {

enum class Backend { scalar, avx2 };

// Backend currently in use.
Backend active_backend();
const char* backend_name();

// Forces a backend. Throws std::runtime_error if unsupported on this CPU.
void set_backend(Backend b);

// True when the AVX2 variant can run on this machine.
bool avx2_supported();

// Sum of all entries.
double sum(std::span<const double> x);

// Dot product; x and y must have equal length.
double dot(std::span<const double> x, std::span<const double> y);

// Sum of x[i] * log2(x[i]). Entries with x[i] <= zero_eps contribute zero,
// implementing the 0*log(0) = 0 convention. Entries must be non-negative.
double plogp_sum(std::span<const double> x, double zero_eps);

// Sum of x[i] * log2(x[i] / y[i]), the Kullback-Leibler accumulation.
// Entries with x[i] <= zero_eps contribute zero; y[i] is floored at y_floor
// to guard gradients against log(0). x, y must have equal length.
double xlogr_sum(std::span<const double> x, std::span<const double> y,
                 double zero_eps, double y_floor);

// Elementwise base-2 logarithm. Inputs must be strictly positive normal
// doubles. in and out may alias; lengths must match.
void log2_map(std::span<const double> in, std::span<double> out);

}  // namespace upt::kern
