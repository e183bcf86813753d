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
#include <string>
#include <vector>

#include <json.hpp>

namespace upt {

// Probability mass function over a finite alphabet. Entries are validated as
// non-negative; vectors whose sum is within 1e-9 of one are renormalized so
// the stored sum is within 1e-12 of one, anything further off is rejected.
// Immutable after construction.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs,
               std::vector<std::string> labels = {});

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  // Stored label, or the index rendered as text.
  std::string label(std::size_t i) const;

  nlohmann::json to_json() const;
  static Pmf from_json(const nlohmann::json& j);

 private:
  std::vector<double> probs_;
  std::vector<std::string> labels_;
};

// Joint distribution over K finite attributes with a public/private
// partition. Axes may appear in both sets (an attribute can be revealed and
// protected at once); together the sets must cover every axis. The table is
// stored flat in row-major order. Immutable after construction.
class JointPmf {
 public:
  JointPmf(std::vector<std::size_t> shape, std::vector<double> table,
           std::vector<std::size_t> public_axes = {},
           std::vector<std::size_t> private_axes = {},
           std::vector<std::string> axis_names = {},
           std::vector<std::vector<std::string>> axis_labels = {});

  std::size_t rank() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t axis_size(std::size_t axis) const { return shape_[axis]; }
  std::size_t cells() const { return table_.size(); }
  std::span<const double> table() const { return table_; }

  const std::vector<std::size_t>& public_axes() const { return public_axes_; }
  const std::vector<std::size_t>& private_axes() const {
    return private_axes_;
  }
  const std::vector<std::string>& axis_names() const { return axis_names_; }
  const std::vector<std::vector<std::string>>& axis_labels() const {
    return axis_labels_;
  }

  // Unravels a flat table index into per-axis coordinates.
  void coords_of(std::size_t flat, std::span<std::size_t> out) const;

  // Marginal over the given axes, flattened to a composite alphabet in the
  // given axis order. Labels of composite symbols join per-axis labels with
  // '|'. Axes must be distinct and in range.
  Pmf marginal(std::span<const std::size_t> axes) const;

  // As marginal() but returns the raw probability vector without constructing
  // a Pmf (used in inner loops).
  std::vector<double> marginal_table(std::span<const std::size_t> axes) const;

  // Composite index of the given axes for the cell at `flat`.
  std::size_t composite_index(std::size_t flat,
                              std::span<const std::size_t> axes) const;

  // Labels of the composite alphabet over `axes` ('|'-joined).
  std::vector<std::string> composite_labels(
      std::span<const std::size_t> axes) const;

  nlohmann::json to_json() const;
  static JointPmf from_json(const nlohmann::json& j);

 private:
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;
  std::vector<std::size_t> public_axes_;
  std::vector<std::size_t> private_axes_;
  std::vector<std::string> axis_names_;
  std::vector<std::vector<std::string>> axis_labels_;
};

}  // namespace upt
