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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace upt {

// Row-stochastic transition matrix from input symbols to output symbols.
// Rows whose sum is within 1e-9 of one are renormalized to within 1e-12;
// anything further off is rejected. Immutable after construction.
class Channel {
 public:
  Channel(std::size_t n_in, std::size_t n_out, std::vector<double> row_major,
          std::vector<std::string> input_labels = {},
          std::vector<std::string> output_labels = {});

  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }
  double at(std::size_t i, std::size_t o) const {
    return m_[i * n_out_ + o];
  }
  std::span<const double> row(std::size_t i) const {
    return {m_.data() + i * n_out_, n_out_};
  }
  std::span<const double> matrix() const { return m_; }

  const std::vector<std::string>& input_labels() const { return in_labels_; }
  const std::vector<std::string>& output_labels() const { return out_labels_; }
  std::string input_label(std::size_t i) const;
  std::string output_label(std::size_t o) const;

  // Output distribution induced by an input distribution.
  std::vector<double> push_forward(std::span<const double> input) const;

  // CSV form: header row of output labels with a leading "input" cell, then
  // one row per input symbol with its label in the first column.
  void to_csv(std::ostream& out) const;
  std::string to_csv_string() const;
  static Channel from_csv(std::istream& in);
  static Channel from_csv_file(const std::string& path);

 private:
  std::size_t n_in_;
  std::size_t n_out_;
  std::vector<double> m_;
  std::vector<std::string> in_labels_;
  std::vector<std::string> out_labels_;
};

}  // namespace upt
