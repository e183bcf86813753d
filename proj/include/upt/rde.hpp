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

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "upt/channel.hpp"
#include "upt/pmf.hpp"

// Numerical solver for the discrete rate-distortion-equivocation region
// without side information. Two boundary objectives are supported: maximal
// equivocation of the private attributes (equivalently minimal leakage,
// solved by Frank-Wolfe over the product of row simplices with exact line
// search) and minimal rate (Blahut-Arimoto alternating minimization). The
// distortion constraint is enforced by bisecting a Lagrange multiplier
// until the achieved distortion hits the target within tolerance. Each
// solve is single-threaded and deterministic; independent solves may run
// in parallel.
namespace upt::rde {

struct RdeProblem {
  // Joint law of the attributes; the private/public axis sets identify
  // X_h and X_r (they may overlap).
  JointPmf joint;
  // rho(x_r, xhat), row-major |X_r| x |Xhat|. Empty means Hamming over the
  // public composite alphabet. Entries must be finite and non-negative.
  std::vector<double> distortion;
  double target_d = 0.0;
  // When set, the channel conditions only on X_r, enforcing the Markov
  // chain X_h - X_r - Xhat (encoding uses the public attributes only).
  // Otherwise the channel conditions on the (X_h, X_r) pair.
  bool markov_restricted = true;

  nlohmann::json to_json() const;
  static RdeProblem from_json(const nlohmann::json& j);
};

// Feasible distortion interval: d_min is the per-symbol minimum, d_max the
// distortion of the best constant output (beyond it nothing more is gained).
void distortion_bounds(const RdeProblem& p, double* d_min, double* d_max);

enum class Objective { max_equivocation, min_rate };
const char* objective_name(Objective o);

struct SolveOptions {
  std::size_t max_iterations = 100000;  // per inner solve
  double gap_tol = 1e-6;                // duality-gap target
  double objective_tol = 1e-10;         // objective-change stop (BA)
  double distortion_tol = 1e-6;         // |achieved - target| target
  // Initial channel matrix (encoding alphabet x output alphabet, row-major).
  // Defaults to 0.5*identity-like + 0.5*uniform, which keeps solves
  // deterministic; tests override it to probe restart consistency.
  std::optional<std::vector<double>> init;
};

struct RdeSolution {
  Channel channel;       // rows: encoding alphabet, cols: output alphabet
  double rate;           // I(X_h X_r; Xhat), bits
  double equivocation;   // H(X_h | Xhat), bits
  double leakage;        // I(X_h; Xhat), bits
  double achieved_d;
  Objective objective;
  std::size_t iterations;
  double final_gap;

  nlohmann::json to_json() const;
};

// Channel minimizing leakage (equivalently maximizing equivocation) subject
// to expected distortion <= target_d. Throws DomainError for infeasible
// targets and Error when the iteration cap is hit before the duality gap
// closes (the message carries the best gap).
RdeSolution solve_max_equivocation(const RdeProblem& p,
                                   const SolveOptions& opts = {});

// Channel minimizing the rate I(X_h X_r; Xhat) subject to the same
// constraint.
RdeSolution solve_min_rate(const RdeProblem& p, const SolveOptions& opts = {});

struct RegionPoint {
  double R;
  double D;
  double E;
};

// Exhaustive sweep over all channels whose rows lie on the simplex grid
// with `grid_resolution` levels per entry. Intended as an independent
// oracle for dominance checks; guarded to alphabets of size <= 4,
// grid_resolution <= 21, and at most 2e6 grid channels (CapError beyond).
std::vector<RegionPoint> brute_force_region(const RdeProblem& p,
                                            std::size_t grid_resolution);

}  // namespace upt::rde
