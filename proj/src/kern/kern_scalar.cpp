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

// Scalar reference kernels. These are the semantic ground truth the AVX2
// variants are tested against.

#include <cmath>
#include <span>

namespace upt::kern::scalar {

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double plogp_sum(std::span<const double> x, double zero_eps) {
  double acc = 0.0;
  for (double v : x) {
    if (v > zero_eps) acc += v * std::log2(v);
  }
  return acc;
}

double xlogr_sum(std::span<const double> x, std::span<const double> y,
                 double zero_eps, double y_floor) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xv = x[i];
    if (xv <= zero_eps) continue;
    const double yv = y[i] < y_floor ? y_floor : y[i];
    acc += xv * std::log2(xv / yv);
  }
  return acc;
}

void log2_map(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::log2(in[i]);
}

}  // namespace upt::kern::scalar
