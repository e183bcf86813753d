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

#include "upt/infotheory.hpp"

#include <algorithm>

#include "upt/errors.hpp"
#include "upt/kern.hpp"

namespace upt {

namespace {

void require_disjoint(std::span<const std::size_t> a,
                      std::span<const std::size_t> b, const char* what) {
  for (std::size_t x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) {
      throw ArgumentError(std::string(what) + ": axis sets overlap on axis " +
                          std::to_string(x));
    }
  }
}

}  // namespace

double entropy(std::span<const double> probs) {
  const double h = -kern::plogp_sum(probs, kProbZeroEps);
  return h < 0.0 ? 0.0 : h;
}

double entropy(const Pmf& p) { return entropy(p.probs()); }

double conditional_entropy(const JointPmf& joint,
                           std::span<const std::size_t> target_axes,
                           std::span<const std::size_t> given_axes) {
  require_disjoint(target_axes, given_axes, "conditional_entropy");
  if (target_axes.empty()) {
    throw ArgumentError("conditional_entropy: empty target axis set");
  }
  std::vector<std::size_t> both(target_axes.begin(), target_axes.end());
  both.insert(both.end(), given_axes.begin(), given_axes.end());
  const double h_both = entropy(joint.marginal_table(both));
  if (given_axes.empty()) return h_both;
  const double h_given = entropy(joint.marginal_table(given_axes));
  const double h = h_both - h_given;
  return h < 0.0 ? 0.0 : h;
}

double mutual_information(const JointPmf& joint,
                          std::span<const std::size_t> axes_a,
                          std::span<const std::size_t> axes_b) {
  require_disjoint(axes_a, axes_b, "mutual_information");
  if (axes_a.empty() || axes_b.empty()) {
    throw ArgumentError("mutual_information: empty axis set");
  }
  std::vector<std::size_t> both(axes_a.begin(), axes_a.end());
  both.insert(both.end(), axes_b.begin(), axes_b.end());
  const double mi = entropy(joint.marginal_table(axes_a)) +
                    entropy(joint.marginal_table(axes_b)) -
                    entropy(joint.marginal_table(both));
  return mi < 0.0 ? 0.0 : mi;
}

JointPmf joint_of(const Pmf& input, const Channel& fwd) {
  if (input.size() != fwd.n_in()) {
    throw ArgumentError("joint_of: input size does not match channel");
  }
  const std::size_t nx = fwd.n_in();
  const std::size_t ny = fwd.n_out();
  std::vector<double> table(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      table[x * ny + y] = input[x] * fwd.at(x, y);
    }
  }
  std::vector<std::vector<std::string>> labels(2);
  if (input.has_labels()) labels[0] = input.labels();
  if (!fwd.output_labels().empty()) labels[1] = fwd.output_labels();
  return JointPmf({nx, ny}, std::move(table), /*public_axes=*/{1},
                  /*private_axes=*/{0}, {"x", "xhat"}, std::move(labels));
}

ReverseResult reverse_channel(const Channel& fwd, const Pmf& input) {
  if (input.size() != fwd.n_in()) {
    throw ArgumentError("reverse_channel: input size does not match channel");
  }
  const std::size_t nx = fwd.n_in();
  const std::size_t ny = fwd.n_out();
  std::vector<double> q = fwd.push_forward(input.probs());

  std::vector<std::size_t> excluded;
  std::vector<std::size_t> kept;
  for (std::size_t y = 0; y < ny; ++y) {
    if (q[y] > kProbZeroEps) {
      kept.push_back(y);
    } else {
      excluded.push_back(y);
    }
  }
  if (kept.empty()) {
    throw DataError("reverse_channel: every output symbol has zero mass");
  }

  std::vector<double> rev(kept.size() * nx);
  std::vector<std::string> rev_in_labels;
  rev_in_labels.reserve(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const std::size_t y = kept[r];
    for (std::size_t x = 0; x < nx; ++x) {
      rev[r * nx + x] = input[x] * fwd.at(x, y) / q[y];
    }
    rev_in_labels.push_back(fwd.output_label(y));
  }
  std::vector<std::string> rev_out_labels;
  if (input.has_labels()) {
    rev_out_labels = input.labels();
  } else {
    for (std::size_t x = 0; x < nx; ++x) {
      rev_out_labels.push_back(fwd.input_label(x));
    }
  }
  Channel reverse(kept.size(), nx, std::move(rev), std::move(rev_in_labels),
                  std::move(rev_out_labels));
  return ReverseResult{std::move(reverse), std::move(excluded), std::move(q)};
}

}  // namespace upt
