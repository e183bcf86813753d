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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "upt/curve.hpp"

// Closed-form rate/leakage curves for a jointly Gaussian public attribute X
// and private attribute Y (correlation rho_xy), optionally with user side
// information Z correlated with X (rho_xz) under the Markov chain Y - X - Z.
// Leakage (mutual information, bits per entry) is the privacy metric here:
// differential equivocation can be negative, leakage cannot. Pure functions,
// thread-safe.
namespace upt::gaussian {

struct GaussianModel {
  double var_x = 1.0;                // sigma_X^2 > 0
  double var_y = 1.0;                // sigma_Y^2 > 0
  double rho_xy = 0.0;               // in [-1, 1]
  std::optional<double> rho_xz;      // absent => no side information

  // Throws DataError on invalid parameters.
  void validate() const;

  nlohmann::json to_json() const;
  static GaussianModel from_json(const nlohmann::json& j);
};

enum class Case { uninformed, statistically_informed, informed };
const char* case_name(Case c);
Case case_from_name(const std::string& name);

struct GaussianPoint {
  double D;          // mean-squared distortion
  double R;          // bits per entry
  double L;          // bits per entry
  double noise_var;  // variance of the achieving additive noise; +inf at the
                     // zero-rate endpoint
  Case case_tag;
};

// No side information: R = (1/2)log2(var_x/D) and
// L = (1/2)log2(1/((1-rho_xy^2) + rho_xy^2 * D/var_x)) for
// D in [1e-12*var_x, var_x]. The achieving channel is Xhat = X + N with
// noise_var = D*var_x/(var_x - D).
GaussianPoint point_uninformed(const GaussianModel& m, double D);

// With side information of law N(0, var_z), rho_xz: the Wyner-Ziv rate
// R = (1/2)log2(var_x*(1-rho_xz^2)/D) on D in
// [1e-12*var_x, var_x*(1-rho_xz^2)]. The leakage equals the uninformed
// leakage at the same D whether or not the encoder observes Z (the informed
// flag only stamps the case tag): minimal-rate encoding leaves privacy
// untouched by user side information.
GaussianPoint point_side_info(const GaussianModel& m, double D, bool informed);

// Per-grid-point curve for the given case. R and L decrease along the grid;
// out-of-domain grid values are rejected individually.
std::vector<GaussianPoint> curve(const GaussianModel& m, Case c,
                                 std::span<const double> grid);

// Admissible distortion interval for a case.
void domain(const GaussianModel& m, Case c, double* lo, double* hi);

}  // namespace upt::gaussian
