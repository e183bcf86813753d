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

#include "upt/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "upt/errors.hpp"
#include "upt/jsonutil.hpp"
#include "upt/kern.hpp"

namespace upt {

namespace {

constexpr double kIngestTol = 1e-9;   // accepted drift of an incoming sum
constexpr double kNegClip = -1e-12;   // entries above this are clipped to 0

// Validates non-negativity, checks the sum against 1 within the ingestion
// tolerance, and rescales in place.
void normalize_total(std::vector<double>& v, const char* what) {
  for (double& x : v) {
    if (x < 0.0) {
      if (x < kNegClip) {
        throw DataError(std::string(what) + ": negative probability entry");
      }
      x = 0.0;
    }
  }
  const double total = kern::sum(v);
  if (!(std::abs(total - 1.0) <= kIngestTol)) {
    throw DataError(std::string(what) + ": probabilities sum to " +
                    std::to_string(total) + ", expected 1");
  }
  for (double& x : v) x /= total;
}

}  // namespace

Pmf::Pmf(std::vector<double> probs, std::vector<std::string> labels)
    : probs_(std::move(probs)), labels_(std::move(labels)) {
  if (probs_.empty()) throw DataError("pmf: empty probability vector");
  if (!labels_.empty() && labels_.size() != probs_.size()) {
    throw DataError("pmf: label count does not match probability count");
  }
  normalize_total(probs_, "pmf");
}

std::string Pmf::label(std::size_t i) const {
  return labels_.empty() ? std::to_string(i) : labels_[i];
}

nlohmann::json Pmf::to_json() const {
  nlohmann::json j;
  nlohmann::json probs = nlohmann::json::array();
  for (double p : probs_) probs.push_back(jreal(p));
  j["probs"] = std::move(probs);
  if (!labels_.empty()) j["labels"] = labels_;
  return j;
}

Pmf Pmf::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("probs") || !j["probs"].is_array()) {
    throw DataError("pmf JSON must be an object with a \"probs\" array");
  }
  std::vector<double> probs;
  for (const auto& v : j["probs"]) {
    if (!v.is_number()) throw DataError("pmf JSON: non-numeric probability");
    probs.push_back(v.get<double>());
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& v : j["labels"]) labels.push_back(v.get<std::string>());
  }
  return Pmf(std::move(probs), std::move(labels));
}

JointPmf::JointPmf(std::vector<std::size_t> shape, std::vector<double> table,
                   std::vector<std::size_t> public_axes,
                   std::vector<std::size_t> private_axes,
                   std::vector<std::string> axis_names,
                   std::vector<std::vector<std::string>> axis_labels)
    : shape_(std::move(shape)),
      table_(std::move(table)),
      public_axes_(std::move(public_axes)),
      private_axes_(std::move(private_axes)),
      axis_names_(std::move(axis_names)),
      axis_labels_(std::move(axis_labels)) {
  if (shape_.empty()) throw DataError("joint pmf: no axes");
  std::size_t cells = 1;
  for (std::size_t s : shape_) {
    if (s == 0) throw DataError("joint pmf: zero-length axis");
    cells *= s;
  }
  if (table_.size() != cells) {
    throw DataError("joint pmf: table size does not match shape");
  }
  normalize_total(table_, "joint pmf");

  strides_.assign(shape_.size(), 1);
  for (std::size_t i = shape_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * shape_[i];
  }

  // An unspecified partition defaults to every attribute being both public
  // and private; otherwise the two sets must cover all axes.
  if (public_axes_.empty() && private_axes_.empty()) {
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      public_axes_.push_back(i);
      private_axes_.push_back(i);
    }
  }
  std::vector<bool> covered(shape_.size(), false);
  for (auto set : {&public_axes_, &private_axes_}) {
    for (std::size_t a : *set) {
      if (a >= shape_.size()) throw DataError("joint pmf: axis out of range");
      covered[a] = true;
    }
  }
  if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) {
    throw DataError(
        "joint pmf: public and private sets together must cover every axis");
  }
  if (!axis_names_.empty() && axis_names_.size() != shape_.size()) {
    throw DataError("joint pmf: axis name count does not match rank");
  }
  if (!axis_labels_.empty()) {
    if (axis_labels_.size() != shape_.size()) {
      throw DataError("joint pmf: axis label count does not match rank");
    }
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (!axis_labels_[i].empty() && axis_labels_[i].size() != shape_[i]) {
        throw DataError("joint pmf: label count mismatch on axis " +
                        std::to_string(i));
      }
    }
  }
}

void JointPmf::coords_of(std::size_t flat, std::span<std::size_t> out) const {
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    out[i] = (flat / strides_[i]) % shape_[i];
  }
}

std::size_t JointPmf::composite_index(
    std::size_t flat, std::span<const std::size_t> axes) const {
  std::size_t idx = 0;
  for (std::size_t a : axes) {
    idx = idx * shape_[a] + (flat / strides_[a]) % shape_[a];
  }
  return idx;
}

std::vector<double> JointPmf::marginal_table(
    std::span<const std::size_t> axes) const {
  std::size_t out_size = 1;
  std::vector<bool> seen(shape_.size(), false);
  for (std::size_t a : axes) {
    if (a >= shape_.size()) throw ArgumentError("marginal: axis out of range");
    if (seen[a]) throw ArgumentError("marginal: repeated axis");
    seen[a] = true;
    out_size *= shape_[a];
  }
  if (axes.empty()) throw ArgumentError("marginal: no axes given");
  std::vector<double> out(out_size, 0.0);
  for (std::size_t flat = 0; flat < table_.size(); ++flat) {
    out[composite_index(flat, axes)] += table_[flat];
  }
  return out;
}

std::vector<std::string> JointPmf::composite_labels(
    std::span<const std::size_t> axes) const {
  std::size_t out_size = 1;
  for (std::size_t a : axes) out_size *= shape_[a];
  std::vector<std::string> labels(out_size);
  std::vector<std::size_t> coord(axes.size(), 0);
  for (std::size_t idx = 0; idx < out_size; ++idx) {
    std::size_t rem = idx;
    std::string text;
    for (std::size_t k = axes.size(); k-- > 0;) {
      coord[k] = rem % shape_[axes[k]];
      rem /= shape_[axes[k]];
    }
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (k > 0) text += '|';
      const std::size_t a = axes[k];
      if (!axis_labels_.empty() && !axis_labels_[a].empty()) {
        text += axis_labels_[a][coord[k]];
      } else {
        text += std::to_string(coord[k]);
      }
    }
    labels[idx] = std::move(text);
  }
  return labels;
}

Pmf JointPmf::marginal(std::span<const std::size_t> axes) const {
  return Pmf(marginal_table(axes), composite_labels(axes));
}

namespace {

void flatten_nested(const nlohmann::json& node,
                    std::vector<std::size_t>& shape, std::size_t depth,
                    std::vector<double>& out) {
  if (node.is_array()) {
    if (depth == shape.size()) {
      shape.push_back(node.size());
    } else if (shape[depth] != node.size()) {
      throw DataError("joint pmf JSON: ragged table");
    }
    for (const auto& child : node) {
      flatten_nested(child, shape, depth + 1, out);
    }
  } else if (node.is_number()) {
    if (depth != shape.size()) throw DataError("joint pmf JSON: ragged table");
    out.push_back(node.get<double>());
  } else {
    throw DataError("joint pmf JSON: table entries must be numbers");
  }
}

nlohmann::json nest_table(std::span<const double> flat,
                          std::span<const std::size_t> shape) {
  if (shape.size() == 1) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : flat) arr.push_back(jreal(v));
    return arr;
  }
  nlohmann::json arr = nlohmann::json::array();
  std::size_t inner = 1;
  for (std::size_t i = 1; i < shape.size(); ++i) inner *= shape[i];
  for (std::size_t i = 0; i < shape[0]; ++i) {
    arr.push_back(
        nest_table(flat.subspan(i * inner, inner), shape.subspan(1)));
  }
  return arr;
}

}  // namespace

nlohmann::json JointPmf::to_json() const {
  nlohmann::json j;
  nlohmann::json axes = nlohmann::json::array();
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    nlohmann::json ax;
    ax["name"] = axis_names_.empty() ? "x" + std::to_string(i)
                                     : axis_names_[i];
    if (!axis_labels_.empty() && !axis_labels_[i].empty()) {
      ax["labels"] = axis_labels_[i];
    } else {
      ax["size"] = shape_[i];
    }
    axes.push_back(std::move(ax));
  }
  j["axes"] = std::move(axes);
  j["table"] = nest_table(table_, shape_);
  auto names_of = [&](const std::vector<std::size_t>& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t a : set) {
      arr.push_back(axis_names_.empty() ? "x" + std::to_string(a)
                                        : axis_names_[a]);
    }
    return arr;
  };
  j["public"] = names_of(public_axes_);
  j["private"] = names_of(private_axes_);
  return j;
}

JointPmf JointPmf::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("table")) {
    throw DataError("joint pmf JSON must be an object with a \"table\"");
  }
  std::vector<std::size_t> shape;
  std::vector<double> flat;
  flatten_nested(j["table"], shape, 0, flat);

  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;
  if (j.contains("axes")) {
    for (const auto& ax : j["axes"]) {
      names.push_back(ax.value("name", "x" + std::to_string(names.size())));
      std::vector<std::string> axl;
      if (ax.contains("labels")) {
        for (const auto& l : ax["labels"]) axl.push_back(l.get<std::string>());
      }
      labels.push_back(std::move(axl));
    }
    if (names.size() != shape.size()) {
      throw DataError("joint pmf JSON: axes count does not match table rank");
    }
  }

  auto set_of = [&](const char* key) {
    std::vector<std::size_t> set;
    if (!j.contains(key)) return set;
    for (const auto& v : j[key]) {
      if (v.is_number_unsigned()) {
        set.push_back(v.get<std::size_t>());
        continue;
      }
      const std::string name = v.get<std::string>();
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw DataError("joint pmf JSON: unknown axis name '" + name + "'");
      }
      set.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    return set;
  };

  auto public_axes = set_of("public");
  auto private_axes = set_of("private");
  return JointPmf(std::move(shape), std::move(flat), std::move(public_axes),
                  std::move(private_axes), std::move(names),
                  std::move(labels));
}

}  // namespace upt
