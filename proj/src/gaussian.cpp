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

#include "upt/gaussian.hpp"

#include <cmath>
#include <limits>

#include "upt/errors.hpp"
#include "upt/jsonutil.hpp"

namespace upt::gaussian {

namespace {

constexpr double kRelFloor = 1e-12;  // smallest accepted D is kRelFloor*var_x

void check_d(double D, double lo, double hi, const char* what) {
  if (!(D >= lo) || !(D <= hi)) {
    throw DomainError(std::string(what) + ": distortion " + std::to_string(D) +
                          " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]",
                      lo, hi);
  }
}

double leakage_at(const GaussianModel& m, double D) {
  const double r2 = m.rho_xy * m.rho_xy;
  const double bracket = (1.0 - r2) + r2 * D / m.var_x;
  return 0.5 * std::log2(1.0 / bracket);
}

}  // namespace

void GaussianModel::validate() const {
  if (!(var_x > 0.0) || !(var_y > 0.0)) {
    throw DataError("gaussian model: variances must be strictly positive");
  }
  if (!(rho_xy >= -1.0 && rho_xy <= 1.0)) {
    throw DataError("gaussian model: rho_xy outside [-1, 1]");
  }
  if (rho_xz && !(*rho_xz >= -1.0 && *rho_xz <= 1.0)) {
    throw DataError("gaussian model: rho_xz outside [-1, 1]");
  }
}

nlohmann::json GaussianModel::to_json() const {
  nlohmann::json j;
  j["var_x"] = jreal(var_x);
  j["var_y"] = jreal(var_y);
  j["rho_xy"] = jreal(rho_xy);
  if (rho_xz) j["rho_xz"] = jreal(*rho_xz);
  return j;
}

GaussianModel GaussianModel::from_json(const nlohmann::json& j) {
  GaussianModel m;
  m.var_x = j.value("var_x", 1.0);
  m.var_y = j.value("var_y", 1.0);
  m.rho_xy = j.value("rho_xy", 0.0);
  if (j.contains("rho_xz")) m.rho_xz = j["rho_xz"].get<double>();
  m.validate();
  return m;
}

const char* case_name(Case c) {
  switch (c) {
    case Case::uninformed:
      return "uninformed";
    case Case::statistically_informed:
      return "si";
    case Case::informed:
      return "informed";
  }
  return "?";
}

Case case_from_name(const std::string& name) {
  if (name == "uninformed") return Case::uninformed;
  if (name == "si" || name == "statistically_informed") {
    return Case::statistically_informed;
  }
  if (name == "informed") return Case::informed;
  throw ArgumentError("unknown gaussian case '" + name + "'");
}

void domain(const GaussianModel& m, Case c, double* lo, double* hi) {
  m.validate();
  *lo = kRelFloor * m.var_x;
  if (c == Case::uninformed) {
    *hi = m.var_x;
    return;
  }
  if (!m.rho_xz) {
    throw DataError("gaussian: side-information case needs rho_xz");
  }
  // Case (iii) shares case (ii)'s interval: the curves coincide.
  *hi = m.var_x * (1.0 - *m.rho_xz * *m.rho_xz);
  if (*hi < *lo) {
    throw DataError("gaussian: side information is deterministic (|rho_xz|=1)");
  }
}

GaussianPoint point_uninformed(const GaussianModel& m, double D) {
  double lo, hi;
  domain(m, Case::uninformed, &lo, &hi);
  check_d(D, lo, hi, "uninformed");
  GaussianPoint pt;
  pt.D = D;
  pt.R = 0.5 * std::log2(m.var_x / D);
  pt.L = leakage_at(m, D);
  pt.noise_var = D < m.var_x
                     ? D * m.var_x / (m.var_x - D)
                     : std::numeric_limits<double>::infinity();
  pt.case_tag = Case::uninformed;
  return pt;
}

GaussianPoint point_side_info(const GaussianModel& m, double D,
                              bool informed) {
  const Case c = informed ? Case::informed : Case::statistically_informed;
  double lo, hi;
  domain(m, c, &lo, &hi);
  check_d(D, lo, hi, "side_info");
  const double var_x_given_z = hi;  // var_x * (1 - rho_xz^2)
  GaussianPoint pt;
  pt.D = D;
  pt.R = 0.5 * std::log2(var_x_given_z / D);
  pt.L = leakage_at(m, D);
  pt.noise_var = D < var_x_given_z
                     ? D * var_x_given_z / (var_x_given_z - D)
                     : std::numeric_limits<double>::infinity();
  pt.case_tag = c;
  return pt;
}

std::vector<GaussianPoint> curve(const GaussianModel& m, Case c,
                                 std::span<const double> grid) {
  std::vector<GaussianPoint> pts;
  pts.reserve(grid.size());
  for (double d : grid) {
    pts.push_back(c == Case::uninformed
                      ? point_uninformed(m, d)
                      : point_side_info(m, d, c == Case::informed));
  }
  return pts;
}

}  // namespace upt::gaussian
