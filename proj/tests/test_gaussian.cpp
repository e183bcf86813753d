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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "upt/errors.hpp"
#include "upt/gaussian.hpp"

using namespace upt;
namespace g = upt::gaussian;

namespace {

g::GaussianModel model(double varx, double rho_xy2, double rho_xz2 = -1.0) {
  g::GaussianModel m;
  m.var_x = varx;
  m.var_y = 1.0;
  m.rho_xy = std::sqrt(rho_xy2);
  if (rho_xz2 >= 0.0) m.rho_xz = std::sqrt(rho_xz2);
  return m;
}

}  // namespace

TEST_CASE("uninformed endpoints and independence") {
  const auto full = g::point_uninformed(model(1.0, 0.5), 1.0);
  CHECK(full.R == 0.0);
  CHECK(full.L == 0.0);

  for (double d : {0.1, 0.4, 0.9}) {
    const auto pt = g::point_uninformed(model(1.0, 0.0), d);
    CHECK(pt.L == 0.0);
  }
}

TEST_CASE("uninformed closed form at a reference point") {
  const auto pt = g::point_uninformed(model(1.0, 0.5), 0.25);
  CHECK(pt.R == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pt.L == doctest::Approx(0.33903595255631885).epsilon(1e-13));
  CHECK(pt.L == doctest::Approx(0.5 * std::log2(1.0 / 0.625)).epsilon(1e-14));
}

TEST_CASE("leakage matches the explicit covariance oracle") {
  const double var_x = 1.7, var_y = 0.9;
  for (double rho2 : {0.2, 0.5, 0.8}) {
    for (double frac : {0.05, 0.3, 0.7, 0.999}) {
      g::GaussianModel m = model(var_x, rho2);
      m.var_y = var_y;
      const double d = frac * var_x;
      const auto pt = g::point_uninformed(m, d);

      // Covariance of (Y, Xhat = X + N) with the returned noise variance.
      const double var_xhat = var_x + pt.noise_var;
      const double cov = m.rho_xy * std::sqrt(var_x * var_y);
      const double var_y_given = var_y - cov * cov / var_xhat;
      const double want = 0.5 * std::log2(var_y / var_y_given);
      CHECK(pt.L == doctest::Approx(want).epsilon(1e-10));

      // The additive channel hits the distortion target: var(X|Xhat) = D.
      const double var_x_given = var_x - var_x * var_x / var_xhat;
      CHECK(var_x_given == doctest::Approx(d).epsilon(1e-10));
    }
  }
}

TEST_CASE("leakage matches quadrature mutual information") {
  const auto pt = g::point_uninformed(model(1.0, 0.5), 0.25);
  const double var_xhat = 1.0 + pt.noise_var;
  const double cov = std::sqrt(0.5) * std::sqrt(var_xhat) *
                     std::sqrt(1.0 / var_xhat);  // cov(Y, Xhat) = rho_xy*...
  // cov(Y, X + N) = cov(Y, X) = rho_xy * sigma_x * sigma_y.
  const double cov_yx = std::sqrt(0.5);
  (void)cov;
  const double mi = oracle::gauss_mi_quadrature(1.0, var_xhat, cov_yx);
  CHECK(pt.L == doctest::Approx(mi).epsilon(1e-7));
}

TEST_CASE("side information: vacuous when rho_xz = 0") {
  const auto m = model(1.0, 0.5, 0.0);
  for (double d : {0.1, 0.5, 0.99}) {
    const auto si = g::point_side_info(m, d, false);
    const auto un = g::point_uninformed(m, d);
    CHECK(si.R == un.R);
    CHECK(si.L == un.L);
  }
}

TEST_CASE("side information: Wyner-Ziv endpoint has zero rate") {
  const auto m = model(1.0, 0.5, 0.75);
  double lo, hi;
  g::domain(m, g::Case::statistically_informed, &lo, &hi);
  CHECK(hi == doctest::Approx(0.25).epsilon(1e-12));
  const auto pt = g::point_side_info(m, hi, false);
  CHECK(pt.R == 0.0);  // exact: log2 of an exact ratio of one
  CHECK(pt.L > 0.0);
}

TEST_CASE("side-information leakage equals uninformed leakage exactly") {
  const auto m = model(1.3, 0.4, 0.6);
  double lo, hi;
  g::domain(m, g::Case::statistically_informed, &lo, &hi);
  for (int i = 1; i <= 16; ++i) {
    const double d = lo + (hi - lo) * i / 16.0;
    const auto si = g::point_side_info(m, d, false);
    const auto inf = g::point_side_info(m, d, true);
    const auto un = g::point_uninformed(m, d);
    CHECK(si.L == un.L);   // identical closed form, bitwise
    CHECK(inf.L == si.L);  // informed case coincides with case (ii)
    CHECK(inf.R == si.R);
  }
}

TEST_CASE("rate is blind to rho_xy; leakage is blind to rho_xz") {
  for (double d : {0.02, 0.08}) {
    const auto r0 = g::point_side_info(model(1.0, 0.0, 0.5), d, false).R;
    for (double rho_xy2 : {0.1, 0.5, 0.9}) {
      CHECK(g::point_side_info(model(1.0, rho_xy2, 0.5), d, false).R == r0);
    }
    const auto l0 = g::point_uninformed(model(1.0, 0.5), d).L;
    for (double rho_xz2 : {0.1, 0.5, 0.9}) {
      CHECK(g::point_side_info(model(1.0, 0.5, rho_xz2), d, false).L == l0);
    }
  }
}

TEST_CASE("curves decrease in distortion") {
  const auto m = model(2.0, 0.6, 0.5);
  std::vector<double> grid;
  double lo, hi;
  g::domain(m, g::Case::statistically_informed, &lo, &hi);
  for (int i = 1; i <= 12; ++i) grid.push_back(hi * i / 12.0);
  const auto pts = g::curve(m, g::Case::statistically_informed, grid);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].R < pts[i - 1].R);
    CHECK(pts[i].L < pts[i - 1].L);
  }
}

TEST_CASE("noise variance solves the conditional-variance identity (SI)") {
  const auto m = model(1.0, 0.5, 0.36);
  const double var_given_z = 1.0 - 0.36;
  for (double frac : {0.1, 0.5, 0.9}) {
    const double d = frac * var_given_z;
    const auto pt = g::point_side_info(m, d, false);
    // 1/var(X|U,Z) = 1/var(X|Z) + 1/noise_var must give var(X|U,Z) = D.
    const double got = 1.0 / (1.0 / var_given_z + 1.0 / pt.noise_var);
    CHECK(got == doctest::Approx(d).epsilon(1e-10));
  }
}

TEST_CASE("domain errors") {
  const auto m = model(1.0, 0.5);
  CHECK_THROWS_AS(g::point_uninformed(m, 0.0), DomainError);
  CHECK_THROWS_AS(g::point_uninformed(m, 1.0 + 1e-9), DomainError);
  try {
    g::point_uninformed(m, 2.0);
  } catch (const DomainError& e) {
    CHECK(e.hi == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(g::point_side_info(m, 0.1, false), DataError);  // no rho_xz

  const auto msi = model(1.0, 0.5, 0.75);
  CHECK_THROWS_AS(g::point_side_info(msi, 0.30, false), DomainError);

  g::GaussianModel bad;
  bad.var_x = -1.0;
  CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("model JSON round trip") {
  const auto m = model(1.5, 0.5, 0.3);
  const auto j = m.to_json();
  const auto back = g::GaussianModel::from_json(j);
  CHECK(back.var_x == doctest::Approx(m.var_x));
  CHECK(back.rho_xy == doctest::Approx(m.rho_xy));
  REQUIRE(back.rho_xz.has_value());
  CHECK(*back.rho_xz == doctest::Approx(*m.rho_xz));
}
