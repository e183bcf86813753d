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

#include "upt/sanitizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "upt/csvio.hpp"
#include "upt/errors.hpp"
#include "upt/infotheory.hpp"
#include "upt/jsonutil.hpp"
#include "upt/rng.hpp"
#include "upt/threads.hpp"

namespace upt::sanitizer {

namespace {

std::vector<double> cumulative(std::span<const double> probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;  // absorb rounding in the last bucket
  return cdf;
}

std::uint32_t draw_from_cdf(std::span<const double> cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(
      std::min<std::ptrdiff_t>(it - cdf.begin(),
                               static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

Database::Database(std::vector<Attribute> schema,
                   std::vector<std::vector<std::uint32_t>> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  if (schema_.empty()) throw DataError("database: no columns");
  if (rows_.empty()) throw DataError("database: no rows");
  for (const auto& row : rows_) {
    if (row.size() != schema_.size()) {
      throw DataError("database: row width does not match schema");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] >= schema_[c].alphabet.size()) {
        throw DataError("database: cell index outside attribute alphabet");
      }
    }
  }
}

std::size_t Database::col_index(const std::string& name) const {
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name == name) return c;
  }
  throw DataError("database: unknown column '" + name + "'");
}

Database Database::from_csv(std::istream& in) {
  const auto records = csv::parse(in);
  if (records.size() < 2) {
    throw DataError("database CSV: need a header row and at least one row");
  }
  const auto& header = records[0];
  const std::size_t ncols = header.size();

  std::vector<Attribute> schema(ncols);
  std::vector<std::map<std::string, std::uint32_t>> lookup(ncols);
  for (std::size_t c = 0; c < ncols; ++c) schema[c].name = header[c];

  // First pass builds sorted alphabets.
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != ncols) {
      throw DataError("database CSV: row " + std::to_string(r) +
                      " has wrong field count");
    }
    for (std::size_t c = 0; c < ncols; ++c) lookup[c][records[r][c]] = 0;
  }
  for (std::size_t c = 0; c < ncols; ++c) {
    std::uint32_t idx = 0;
    for (auto& [value, slot] : lookup[c]) {
      schema[c].alphabet.push_back(value);
      slot = idx++;
    }
  }

  std::vector<std::vector<std::uint32_t>> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::vector<std::uint32_t> row(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      row[c] = lookup[c][records[r][c]];
    }
    rows.push_back(std::move(row));
  }
  return Database(std::move(schema), std::move(rows));
}

Database Database::from_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return from_csv(in);
}

void Database::to_csv(std::ostream& out) const {
  std::vector<std::string> header;
  header.reserve(schema_.size());
  for (const auto& a : schema_) header.push_back(a.name);
  csv::write_row(out, header);
  std::vector<std::string> fields(schema_.size());
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      fields[c] = schema_[c].alphabet[row[c]];
    }
    csv::write_row(out, fields);
  }
}

std::string Database::to_csv_string() const {
  std::ostringstream out;
  to_csv(out);
  return out.str();
}

Database synth_database(const Pmf& source, const std::string& column_name,
                        std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("synth_database: n must be >= 1");
  Attribute attr;
  attr.name = column_name;
  for (std::size_t i = 0; i < source.size(); ++i) {
    attr.alphabet.push_back(source.label(i));
  }
  const auto cdf = cumulative(source.probs());
  std::vector<std::vector<std::uint32_t>> rows(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(mix64(seed, i));
      rows[i] = {draw_from_cdf(cdf, rng.next_double())};
    }
  });
  return Database({std::move(attr)}, std::move(rows));
}

JointPmf fit_empirical_pmf(const Database& db,
                           std::span<const std::string> attributes,
                           double smoothing,
                           std::span<const std::string> public_names,
                           std::span<const std::string> private_names) {
  if (attributes.empty()) {
    throw ArgumentError("fit_empirical_pmf: no attributes given");
  }
  if (smoothing < 0.0) {
    throw ArgumentError("fit_empirical_pmf: smoothing must be >= 0");
  }
  std::vector<std::size_t> cols;
  std::vector<std::size_t> shape;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;
  std::size_t cells = 1;
  for (const auto& name : attributes) {
    const std::size_t c = db.col_index(name);
    cols.push_back(c);
    shape.push_back(db.schema()[c].alphabet.size());
    names.push_back(name);
    labels.push_back(db.schema()[c].alphabet);
    cells *= shape.back();
  }

  std::vector<double> table(cells, smoothing);
  for (std::size_t r = 0; r < db.n_rows(); ++r) {
    const auto row = db.row(r);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      idx = idx * shape[k] + row[cols[k]];
    }
    table[idx] += 1.0;
  }
  const double total =
      static_cast<double>(db.n_rows()) + smoothing * static_cast<double>(cells);
  for (double& v : table) v /= total;

  auto set_of = [&](std::span<const std::string> wanted) {
    std::vector<std::size_t> set;
    for (const auto& name : wanted) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw DataError("fit_empirical_pmf: '" + name +
                        "' is not among the fitted attributes");
      }
      set.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    return set;
  };
  auto public_axes = set_of(public_names);
  auto private_axes = set_of(private_names);
  return JointPmf(std::move(shape), std::move(table), std::move(public_axes),
                  std::move(private_axes), std::move(names),
                  std::move(labels));
}

namespace {

// Shared machinery for drawing output symbols of one composite column set.
struct ChannelSampler {
  std::vector<std::vector<double>> cdfs;      // per channel input row
  std::vector<std::ptrdiff_t> symbol_to_row;  // composite symbol -> row, -1 unseen
  std::vector<double> unseen_cdf;             // used when map_unseen is set
  bool map_unseen = false;

  std::uint32_t draw(std::size_t symbol, Rng& rng) const {
    const std::ptrdiff_t r = symbol_to_row[symbol];
    if (r >= 0) {
      return draw_from_cdf(cdfs[static_cast<std::size_t>(r)],
                           rng.next_double());
    }
    return draw_from_cdf(unseen_cdf, rng.next_double());
  }
};

ChannelSampler build_sampler(const Database& db, const Channel& channel,
                             std::span<const std::size_t> cols,
                             bool map_unseen) {
  // Composite symbol index: odometer over the selected columns.
  std::size_t n_sym = 1;
  for (std::size_t c : cols) n_sym *= db.schema()[c].alphabet.size();

  std::unordered_map<std::string, std::size_t> channel_rows;
  for (std::size_t i = 0; i < channel.n_in(); ++i) {
    channel_rows[channel.input_label(i)] = i;
  }

  ChannelSampler s;
  s.map_unseen = map_unseen;
  s.cdfs.reserve(channel.n_in());
  for (std::size_t i = 0; i < channel.n_in(); ++i) {
    s.cdfs.push_back(cumulative(channel.row(i)));
  }
  s.symbol_to_row.assign(n_sym, -1);

  std::vector<std::size_t> coord(cols.size(), 0);
  for (std::size_t sym = 0; sym < n_sym; ++sym) {
    std::size_t rem = sym;
    for (std::size_t k = cols.size(); k-- > 0;) {
      coord[k] = rem % db.schema()[cols[k]].alphabet.size();
      rem /= db.schema()[cols[k]].alphabet.size();
    }
    std::string label;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k > 0) label += '|';
      label += db.schema()[cols[k]].alphabet[coord[k]];
    }
    const auto it = channel_rows.find(label);
    if (it != channel_rows.end()) {
      s.symbol_to_row[sym] = static_cast<std::ptrdiff_t>(it->second);
    }
  }

  // Count rows per composite symbol; reject or prepare the unseen rule.
  std::vector<std::size_t> counts(n_sym, 0);
  for (std::size_t r = 0; r < db.n_rows(); ++r) {
    std::size_t idx = 0;
    for (std::size_t c : cols) {
      idx = idx * db.schema()[c].alphabet.size() + db.row(r)[c];
    }
    counts[idx]++;
  }
  std::vector<double> seen_pmf(channel.n_in(), 0.0);
  double seen_total = 0.0;
  bool any_unseen = false;
  for (std::size_t sym = 0; sym < n_sym; ++sym) {
    if (counts[sym] == 0) continue;
    if (s.symbol_to_row[sym] >= 0) {
      seen_pmf[static_cast<std::size_t>(s.symbol_to_row[sym])] +=
          static_cast<double>(counts[sym]);
      seen_total += static_cast<double>(counts[sym]);
    } else {
      any_unseen = true;
      if (!map_unseen) {
        // Recover the offending label for the message.
        std::size_t rem = sym;
        std::string label;
        std::vector<std::size_t> cc(cols.size());
        for (std::size_t k = cols.size(); k-- > 0;) {
          cc[k] = rem % db.schema()[cols[k]].alphabet.size();
          rem /= db.schema()[cols[k]].alphabet.size();
        }
        for (std::size_t k = 0; k < cols.size(); ++k) {
          if (k > 0) label += '|';
          label += db.schema()[cols[k]].alphabet[cc[k]];
        }
        throw DataError(
            "sanitize: symbol '" + label +
            "' is not in the channel's input alphabet (use the unseen-symbol "
            "rule to map it through the output distribution)");
      }
    }
  }
  if (any_unseen && map_unseen) {
    if (seen_total <= 0.0) {
      throw DataError("sanitize: no rows match the channel input alphabet");
    }
    for (double& v : seen_pmf) v /= seen_total;
    s.unseen_cdf = cumulative(channel.push_forward(seen_pmf));
  }
  return s;
}

}  // namespace

Database sanitize_rows(const Database& db, const Channel& channel,
                       std::span<const std::string> public_columns,
                       std::uint64_t seed, bool map_unseen) {
  if (public_columns.empty()) {
    throw ArgumentError("sanitize_rows: no public columns named");
  }
  std::vector<std::size_t> cols;
  for (const auto& name : public_columns) cols.push_back(db.col_index(name));

  const ChannelSampler sampler = build_sampler(db, channel, cols, map_unseen);

  // Output symbols must split back into the public columns.
  std::vector<Attribute> out_schema;
  for (std::size_t c : cols) out_schema.push_back(db.schema()[c]);
  std::vector<std::vector<std::uint32_t>> out_cells(channel.n_out());
  for (std::size_t o = 0; o < channel.n_out(); ++o) {
    const std::string label = channel.output_label(o);
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : label) {
      if (ch == '|') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() != cols.size()) {
      throw DataError("sanitize: channel output label '" + label +
                      "' does not split into " +
                      std::to_string(cols.size()) + " public columns");
    }
    std::vector<std::uint32_t> cell(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto& alpha = out_schema[k].alphabet;
      const auto it = std::find(alpha.begin(), alpha.end(), parts[k]);
      if (it == alpha.end()) {
        // Output symbol unseen in the input data: extend the alphabet.
        out_schema[k].alphabet.push_back(parts[k]);
        cell[k] = static_cast<std::uint32_t>(alpha.size() - 1);
      } else {
        cell[k] = static_cast<std::uint32_t>(it - alpha.begin());
      }
    }
    out_cells[o] = std::move(cell);
  }

  std::vector<std::vector<std::uint32_t>> out_rows(db.n_rows());
  parallel_for(db.n_rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t sym = 0;
      for (std::size_t c : cols) {
        sym = sym * db.schema()[c].alphabet.size() + db.row(i)[c];
      }
      Rng rng(mix64(seed, i));
      out_rows[i] = out_cells[sampler.draw(sym, rng)];
    }
  });
  return Database(std::move(out_schema), std::move(out_rows));
}

Database sanitize_per_attribute(
    const Database& db,
    std::span<const std::pair<std::string, Channel>> channels,
    std::uint64_t seed, bool map_unseen) {
  if (channels.empty()) {
    throw ArgumentError("sanitize_per_attribute: no channels given");
  }
  std::vector<Database> parts;
  parts.reserve(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const std::string cols[] = {channels[k].first};
    parts.push_back(sanitize_rows(db, channels[k].second, cols,
                                  mix64(seed, 0x5eed0000 + k), map_unseen));
  }
  std::vector<Attribute> schema;
  for (const auto& p : parts) schema.push_back(p.schema()[0]);
  std::vector<std::vector<std::uint32_t>> rows(db.n_rows());
  for (std::size_t i = 0; i < db.n_rows(); ++i) {
    rows[i].resize(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      rows[i][k] = parts[k].row(i)[0];
    }
  }
  return Database(std::move(schema), std::move(rows));
}

SanitizationReport evaluate(const Database& db, const Database& sdb,
                            const Channel& channel, const JointPmf& design,
                            std::span<const std::string> public_columns,
                            double target_d, std::uint64_t seed) {
  if (db.n_rows() != sdb.n_rows()) {
    throw ArgumentError("evaluate: row counts differ");
  }
  std::vector<std::size_t> in_cols, out_cols;
  for (const auto& name : public_columns) {
    in_cols.push_back(db.col_index(name));
    out_cols.push_back(sdb.col_index(name));
  }

  // Empirical Hamming distortion on the public composite.
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < db.n_rows(); ++i) {
    bool same = true;
    for (std::size_t k = 0; k < in_cols.size() && same; ++k) {
      same = db.value(i, in_cols[k]) == sdb.value(i, out_cols[k]);
    }
    if (!same) ++mismatches;
  }

  // Design joint of (X_h, Xhat): p(h, y) = sum_r p(h, r) W(y | r), with
  // channel rows matched to the design's public composite labels.
  const auto& priv = design.private_axes();
  const auto& pub = design.public_axes();
  std::size_t nh = 1, nr = 1;
  for (std::size_t a : priv) nh *= design.axis_size(a);
  for (std::size_t a : pub) nr *= design.axis_size(a);
  const auto pub_labels = design.composite_labels(pub);
  std::vector<std::ptrdiff_t> row_of(nr, -1);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t i = 0; i < channel.n_in(); ++i) {
      if (channel.input_label(i) == pub_labels[r]) {
        row_of[r] = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
    if (row_of[r] < 0) {
      throw DataError("evaluate: design symbol '" + pub_labels[r] +
                      "' missing from channel input alphabet");
    }
  }
  std::vector<double> p2(nh * nr, 0.0);
  for (std::size_t flat = 0; flat < design.cells(); ++flat) {
    const std::size_t h = design.composite_index(flat, priv);
    const std::size_t r = design.composite_index(flat, pub);
    p2[h * nr + r] += design.table()[flat];
  }
  const std::size_t ny = channel.n_out();
  std::vector<double> phy(nh * ny, 0.0);
  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t r = 0; r < nr; ++r) {
      const double w = p2[h * nr + r];
      if (w == 0.0) continue;
      const auto row = channel.row(static_cast<std::size_t>(row_of[r]));
      for (std::size_t y = 0; y < ny; ++y) phy[h * ny + y] += w * row[y];
    }
  }
  std::vector<double> q(ny, 0.0);
  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t y = 0; y < ny; ++y) q[y] += phy[h * ny + y];
  }
  const double analytic = entropy(phy) - entropy(q);

  // Plug-in estimate: empirical output frequencies with the design
  // posterior p(h | y).
  std::vector<std::size_t> out_count(ny, 0);
  std::unordered_map<std::string, std::size_t> out_index;
  for (std::size_t y = 0; y < ny; ++y) out_index[channel.output_label(y)] = y;
  for (std::size_t i = 0; i < sdb.n_rows(); ++i) {
    std::string label;
    for (std::size_t k = 0; k < out_cols.size(); ++k) {
      if (k > 0) label += '|';
      label += sdb.value(i, out_cols[k]);
    }
    const auto it = out_index.find(label);
    if (it == out_index.end()) {
      throw DataError("evaluate: sanitized symbol '" + label +
                      "' is not a channel output");
    }
    out_count[it->second]++;
  }
  double plugin = 0.0;
  std::vector<double> post(nh);
  for (std::size_t y = 0; y < ny; ++y) {
    if (out_count[y] == 0 || q[y] <= 0.0) continue;
    for (std::size_t h = 0; h < nh; ++h) post[h] = phy[h * ny + y] / q[y];
    plugin += (static_cast<double>(out_count[y]) /
               static_cast<double>(sdb.n_rows())) *
              entropy(post);
  }

  SanitizationReport rep;
  rep.n = db.n_rows();
  rep.target_d = target_d;
  rep.empirical_d =
      static_cast<double>(mismatches) / static_cast<double>(db.n_rows());
  rep.analytic_equivocation = analytic;
  rep.plugin_equivocation = plugin;
  rep.seed = seed;
  return rep;
}

nlohmann::json SanitizationReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["target_d"] = jreal(target_d);
  j["empirical_d"] = jreal(empirical_d);
  j["analytic_equivocation"] = jreal(analytic_equivocation);
  j["plugin_equivocation"] = jreal(plugin_equivocation);
  j["seed"] = seed;
  return j;
}

}  // namespace upt::sanitizer
