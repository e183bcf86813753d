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

#include <span>
#include <vector>

#include "upt/channel.hpp"
#include "upt/pmf.hpp"

// Information measures in bits (base-2 logarithms throughout). Entries below
// 1e-15 are treated as exact zeros, implementing the 0*log(0) = 0 convention.
// All functions are pure and thread-safe.
namespace upt {

inline constexpr double kProbZeroEps = 1e-15;

// Shannon entropy of a raw probability vector (assumed valid).
double entropy(std::span<const double> probs);

// H(p), in [0, log2 |X|].
double entropy(const Pmf& p);

// H(target | given) = H(target, given) - H(given). The axis sets must be
// disjoint; `given` may be empty, which yields the plain marginal entropy.
double conditional_entropy(const JointPmf& joint,
                           std::span<const std::size_t> target_axes,
                           std::span<const std::size_t> given_axes);

// I(a; b) = H(a) + H(b) - H(a, b), clamped at zero. Axis sets must be
// disjoint and non-empty.
double mutual_information(const JointPmf& joint,
                          std::span<const std::size_t> axes_a,
                          std::span<const std::size_t> axes_b);

// Two-attribute joint (X, X-hat) induced by feeding `input` through `fwd`.
// Axis 0 is the input and is marked private, axis 1 the output, public.
JointPmf joint_of(const Pmf& input, const Channel& fwd);

// Bayes inversion of a forward channel under an input distribution. Output
// symbols with zero marginal mass have no defined posterior; they are
// excluded from the reverse channel and reported in `excluded_outputs`.
struct ReverseResult {
  Channel channel;  // rows: surviving output symbols; columns: input symbols
  std::vector<std::size_t> excluded_outputs;
  std::vector<double> output_marginal;  // over all original output symbols
};
ReverseResult reverse_channel(const Channel& fwd, const Pmf& input);

}  // namespace upt
