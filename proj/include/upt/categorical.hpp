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
#include <vector>

#include <json.hpp>

#include "upt/channel.hpp"
#include "upt/curve.hpp"
#include "upt/pmf.hpp"

// Closed-form optimal sanitization of an arbitrary discrete source under
// Hamming distortion: reverse waterfilling. Symbols whose probability falls
// below the water level are suppressed (never emitted); the rest are kept
// with their excess mass. All functions are pure and thread-safe.
namespace upt::categorical {

// Largest admissible Hamming distortion, 1 - max_x p(x). Beyond it the rate
// is already zero.
double d_max(const Pmf& source);

struct LambdaResult {
  double lambda;                     // water level
  std::vector<std::size_t> support;  // retained symbols, ascending index
};

// Water level and support for a target distortion. The support is the set
// {x : p(x) - lambda > 0}; symbols with p(x) == lambda are excluded. D must
// lie in [0, d_max]; at the right endpoint the support degenerates to the
// set of maximum-probability symbols. lambda is found exactly by scanning
// the piecewise-linear map D(lambda) = S*lambda + sum of suppressed mass
// over its breakpoints (the distinct source probabilities).
LambdaResult lambda_from_distortion(const Pmf& source, double D);

struct WaterfillSolution {
  double lambda;
  std::vector<std::size_t> support;
  std::size_t S;              // |support| - 1
  Pmf output_pmf;             // p(xhat) over the full alphabet, zeros off support
  Channel test_channel;       // p(x | xhat), rows indexed by xhat
  Channel forward_channel;    // p(xhat | x), rows indexed by x
  double distortion;
  double equivocation;        // Gamma(D), bits
  double rate;                // H(X) - Gamma(D), bits

  // Solution summary (lambda, support, D, Gamma, R); the channels are
  // serialized separately as CSV.
  nlohmann::json to_json() const;
};

// Full closed-form solution at distortion D. The test channel rows for
// suppressed output symbols carry the source distribution (those outputs
// have zero mass, so any completion is consistent; the prior keeps rows
// stochastic and stationarity intact). Suppressed and zero-probability
// input symbols map forward with the output distribution p(xhat).
WaterfillSolution reverse_waterfill(const Pmf& source, double D);

// Maximal equivocation Gamma(D) =
//   -(1-D)log2(1-D) - S*lambda*log2(lambda) - sum_k p_k log2(p_k)
// over suppressed symbols k. Equals H(X|Xhat) of the induced joint.
double gamma(const Pmf& source, double D);

// Boundary sweep: per grid value, (D, R, E) with L = R (the source is its
// own private attribute here, so leakage and rate coincide). Rejects any
// out-of-domain grid value, identifying it.
TradeoffCurve up_curve(const Pmf& source, std::span<const double> grid);

}  // namespace upt::categorical
