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

#include "upt/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "upt/csvio.hpp"
#include "upt/errors.hpp"
#include "upt/kern.hpp"

namespace upt {

Channel::Channel(std::size_t n_in, std::size_t n_out,
                 std::vector<double> row_major,
                 std::vector<std::string> input_labels,
                 std::vector<std::string> output_labels)
    : n_in_(n_in),
      n_out_(n_out),
      m_(std::move(row_major)),
      in_labels_(std::move(input_labels)),
      out_labels_(std::move(output_labels)) {
  if (n_in_ == 0 || n_out_ == 0) throw DataError("channel: empty alphabet");
  if (m_.size() != n_in_ * n_out_) {
    throw DataError("channel: matrix size does not match alphabets");
  }
  if (!in_labels_.empty() && in_labels_.size() != n_in_) {
    throw DataError("channel: input label count mismatch");
  }
  if (!out_labels_.empty() && out_labels_.size() != n_out_) {
    throw DataError("channel: output label count mismatch");
  }
  for (std::size_t i = 0; i < n_in_; ++i) {
    double* row = m_.data() + i * n_out_;
    for (std::size_t o = 0; o < n_out_; ++o) {
      if (row[o] < 0.0) {
        if (row[o] < -1e-12) {
          throw DataError("channel: negative entry in row " +
                          std::to_string(i));
        }
        row[o] = 0.0;
      }
      if (row[o] > 1.0 + 1e-9) {
        throw DataError("channel: entry above 1 in row " + std::to_string(i));
      }
    }
    const double total = kern::sum({row, n_out_});
    if (!(std::abs(total - 1.0) <= 1e-9)) {
      throw DataError("channel: row " + std::to_string(i) + " sums to " +
                      std::to_string(total) + ", expected 1");
    }
    for (std::size_t o = 0; o < n_out_; ++o) row[o] /= total;
  }
}

std::string Channel::input_label(std::size_t i) const {
  return in_labels_.empty() ? std::to_string(i) : in_labels_[i];
}

std::string Channel::output_label(std::size_t o) const {
  return out_labels_.empty() ? std::to_string(o) : out_labels_[o];
}

std::vector<double> Channel::push_forward(
    std::span<const double> input) const {
  if (input.size() != n_in_) {
    throw ArgumentError("push_forward: input size mismatch");
  }
  std::vector<double> out(n_out_, 0.0);
  for (std::size_t i = 0; i < n_in_; ++i) {
    const double w = input[i];
    if (w == 0.0) continue;
    const double* row = m_.data() + i * n_out_;
    for (std::size_t o = 0; o < n_out_; ++o) out[o] += w * row[o];
  }
  return out;
}

void Channel::to_csv(std::ostream& out) const {
  std::vector<std::string> header;
  header.reserve(n_out_ + 1);
  header.push_back("input");
  for (std::size_t o = 0; o < n_out_; ++o) header.push_back(output_label(o));
  csv::write_row(out, header);
  for (std::size_t i = 0; i < n_in_; ++i) {
    std::vector<std::string> row;
    row.reserve(n_out_ + 1);
    row.push_back(input_label(i));
    for (std::size_t o = 0; o < n_out_; ++o) {
      row.push_back(csv::fmt12(at(i, o)));
    }
    csv::write_row(out, row);
  }
}

std::string Channel::to_csv_string() const {
  std::ostringstream out;
  to_csv(out);
  return out.str();
}

Channel Channel::from_csv(std::istream& in) {
  const auto records = csv::parse(in);
  if (records.size() < 2) throw DataError("channel CSV: need header and rows");
  const auto& header = records[0];
  if (header.size() < 2) throw DataError("channel CSV: no output columns");
  std::vector<std::string> out_labels(header.begin() + 1, header.end());
  const std::size_t n_out = out_labels.size();
  std::vector<std::string> in_labels;
  std::vector<double> m;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (row.size() != n_out + 1) {
      throw DataError("channel CSV: row " + std::to_string(r) +
                      " has wrong field count");
    }
    in_labels.push_back(row[0]);
    for (std::size_t o = 0; o < n_out; ++o) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(row[o + 1], &pos);
      } catch (const std::exception&) {
        throw DataError("channel CSV: bad number '" + row[o + 1] + "'");
      }
      if (pos != row[o + 1].size()) {
        throw DataError("channel CSV: bad number '" + row[o + 1] + "'");
      }
      m.push_back(v);
    }
  }
  const std::size_t n_in = in_labels.size();
  return Channel(n_in, n_out, std::move(m), std::move(in_labels),
                 std::move(out_labels));
}

Channel Channel::from_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return from_csv(in);
}

}  // namespace upt
