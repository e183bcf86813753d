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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "upt/channel.hpp"
#include "upt/pmf.hpp"

// Applies a sanitization channel to concrete tabular data: fit an empirical
// pmf, redraw each row's public symbols through the channel, and report
// empirical distortion and equivocation against the design targets.
namespace upt::sanitizer {

struct Attribute {
  std::string name;
  std::vector<std::string> alphabet;  // sorted distinct values
};

// Categorical table: each cell stores the index of its value within the
// column's alphabet. Immutable after construction.
class Database {
 public:
  Database(std::vector<Attribute> schema,
           std::vector<std::vector<std::uint32_t>> rows);

  std::size_t n_rows() const { return rows_.size(); }
  std::size_t n_cols() const { return schema_.size(); }
  const std::vector<Attribute>& schema() const { return schema_; }
  std::span<const std::uint32_t> row(std::size_t i) const { return rows_[i]; }
  const std::string& value(std::size_t row, std::size_t col) const {
    return schema_[col].alphabet[rows_[row][col]];
  }
  // Throws DataError for unknown names.
  std::size_t col_index(const std::string& name) const;

  // CSV with a header row; column alphabets are the sorted distinct values.
  static Database from_csv(std::istream& in);
  static Database from_csv_file(const std::string& path);
  void to_csv(std::ostream& out) const;
  std::string to_csv_string() const;

 private:
  std::vector<Attribute> schema_;
  std::vector<std::vector<std::uint32_t>> rows_;
};

// Synthetic single-column database of n i.i.d. draws (used by tests and
// demos). Deterministic given the seed.
Database synth_database(const Pmf& source, const std::string& column_name,
                        std::size_t n, std::uint64_t seed);

// Maximum-likelihood frequency table over the named attributes, in order,
// with optional additive smoothing. The public/private name lists select
// the corresponding axis sets of the result (defaulting to all axes).
JointPmf fit_empirical_pmf(const Database& db,
                           std::span<const std::string> attributes,
                           double smoothing = 0.0,
                           std::span<const std::string> public_names = {},
                           std::span<const std::string> private_names = {});

// Replaces each row's public composite symbol (named columns joined with
// '|') by an independent draw from the matching channel row. Rows are
// processed in parallel with per-row seeds mix64(seed, row), so results do
// not depend on the worker count. The output contains only the public
// columns. Symbols absent from the channel's input alphabet are rejected
// unless map_unseen is set, in which case they draw from the channel's
// output distribution under the database's own empirical input law (the
// suppressed-symbol rule).
Database sanitize_rows(const Database& db, const Channel& channel,
                       std::span<const std::string> public_columns,
                       std::uint64_t seed, bool map_unseen = false);

// Per-attribute variant: each named column is sanitized independently with
// its own channel.
Database sanitize_per_attribute(
    const Database& db,
    std::span<const std::pair<std::string, Channel>> channels,
    std::uint64_t seed, bool map_unseen = false);

struct SanitizationReport {
  std::size_t n = 0;
  double target_d = 0.0;
  double empirical_d = 0.0;          // mean Hamming mismatch
  double analytic_equivocation = 0;  // H(X_h | Xhat) of the design
  double plugin_equivocation = 0;    // empirical output law x design posterior
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// Hamming distortion and equivocation accounting for a sanitized database.
// `design` is the joint law of the private and public attributes the channel
// was designed against (its axis sets select X_h and X_r); channel rows are
// matched to the design's public composite labels.
SanitizationReport evaluate(const Database& db, const Database& sdb,
                            const Channel& channel, const JointPmf& design,
                            std::span<const std::string> public_columns,
                            double target_d, std::uint64_t seed);

}  // namespace upt::sanitizer
