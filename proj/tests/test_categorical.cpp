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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "upt/categorical.hpp"
#include "upt/errors.hpp"
#include "upt/infotheory.hpp"

using namespace upt;
namespace cat = upt::categorical;

namespace {

// Stationarity sum_xhat q(xhat) p(x|xhat) == p(x), elementwise.
void check_stationarity(const cat::WaterfillSolution& sol, const Pmf& source,
                        double tol = 1e-10) {
  const std::size_t n = source.size();
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      acc += sol.output_pmf[y] * sol.test_channel.at(y, x);
    }
    CHECK(std::abs(acc - source[x]) <= tol);
  }
}

void check_solution_invariants(const cat::WaterfillSolution& sol,
                               const Pmf& source) {
  const std::size_t n = source.size();
  // support = {x : p(x) - lambda > 0}
  std::vector<bool> in_support(n, false);
  for (std::size_t i : sol.support) in_support[i] = true;
  const bool at_right_end =
      std::abs(sol.distortion - cat::d_max(source)) <= 1e-12;
  if (!at_right_end) {
    for (std::size_t x = 0; x < n; ++x) {
      CHECK(in_support[x] == (source[x] - sol.lambda > 0.0));
    }
  }
  CHECK(sol.S + 1 == sol.support.size());

  // Output law: normalized excess mass.
  double denom = 0.0;
  for (std::size_t i : sol.support) denom += source[i] - sol.lambda;
  if (denom > 1e-15) {
    for (std::size_t x = 0; x < n; ++x) {
      const double want =
          in_support[x] ? (source[x] - sol.lambda) / denom : 0.0;
      CHECK(std::abs(sol.output_pmf[x] - want) <= 1e-10);
    }
  }

  check_stationarity(sol, source);

  // D = S*lambda + suppressed mass.
  double out_mass = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!in_support[x]) out_mass += source[x];
  }
  CHECK(std::abs(sol.distortion -
                 (static_cast<double>(sol.S) * sol.lambda + out_mass)) <=
        1e-10);

  // R = H(X) - Gamma.
  CHECK(std::abs(sol.rate - (entropy(source) - sol.equivocation)) <= 1e-10);

  // Gamma equals H(X|Xhat) of the induced joint.
  const JointPmf joint = joint_of(source, sol.forward_channel);
  const std::size_t a0[] = {0}, a1[] = {1};
  CHECK(std::abs(sol.equivocation - conditional_entropy(joint, a0, a1)) <=
        1e-10);

  // Forward rows of suppressed symbols emit from the output law.
  for (std::size_t x = 0; x < n; ++x) {
    if (in_support[x]) continue;
    for (std::size_t y = 0; y < n; ++y) {
      CHECK(std::abs(sol.forward_channel.at(x, y) - sol.output_pmf[y]) <=
            1e-12);
    }
  }
}

}  // namespace

TEST_CASE("water level: uniform binary and the trivial endpoints") {
  const Pmf half({0.5, 0.5});
  const auto r = cat::lambda_from_distortion(half, 0.2);
  CHECK(r.lambda == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(r.support.size() == 2);

  // D = 0 keeps every positive-mass symbol at water level zero.
  const Pmf p({0.5, 0.3, 0.2});
  const auto r0 = cat::lambda_from_distortion(p, 0.0);
  CHECK(r0.lambda == 0.0);
  CHECK(r0.support.size() == 3);
}

TEST_CASE("water level on the outlier law matches the exhaustive oracle") {
  const Pmf source(oracle::outlier_pmf());

  const auto got = cat::lambda_from_distortion(source, 0.1);
  const auto want = oracle::lambda_scan_exhaustive(source.probs(), 0.1);
  CHECK(got.lambda == doctest::Approx(want.lambda).epsilon(1e-13));
  CHECK(got.support == want.support);

  // The three thinnest symbols are suppressed at D = 0.1. On the
  // normalized law the oracle's level is 0.021875 (the unnormalized
  // weights would give 0.0225).
  CHECK(got.support == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(got.lambda == doctest::Approx(0.021875).epsilon(1e-12));

  // Support shrinks along D = 0.1 -> 0.25 -> 0.5.
  const auto s25 = cat::lambda_from_distortion(source, 0.25);
  const auto s50 = cat::lambda_from_distortion(source, 0.5);
  CHECK(s25.support.size() == 4);
  CHECK(s50.support.size() == 3);
}

TEST_CASE("water level rejects out-of-range distortion") {
  const Pmf source(oracle::outlier_pmf());
  const double dmax = cat::d_max(source);
  CHECK(dmax == doctest::Approx(1.0 - 0.3125).epsilon(1e-12));
  CHECK_THROWS_AS(cat::lambda_from_distortion(source, dmax + 0.01),
                  DomainError);
  CHECK_THROWS_AS(cat::lambda_from_distortion(source, -0.01), DomainError);
  try {
    cat::lambda_from_distortion(source, 0.9);
  } catch (const DomainError& e) {
    CHECK(e.hi == doctest::Approx(dmax));
  }
}

TEST_CASE("reverse waterfilling: identity at D = 0") {
  const Pmf source({0.5, 0.3, 0.2});
  const auto sol = cat::reverse_waterfill(source, 0.0);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      CHECK(sol.forward_channel.at(x, y) ==
            doctest::Approx(x == y ? 1.0 : 0.0).epsilon(1e-12));
    }
    CHECK(sol.output_pmf[x] == doctest::Approx(source[x]).epsilon(1e-12));
  }
  CHECK(sol.equivocation == doctest::Approx(0.0).epsilon(1e-12));
  check_solution_invariants(sol, source);
}

TEST_CASE("reverse waterfilling: binary symmetric structure") {
  const Pmf half({0.5, 0.5});
  const auto sol = cat::reverse_waterfill(half, 0.11);
  CHECK(sol.lambda == doctest::Approx(0.11).epsilon(1e-13));
  CHECK(sol.test_channel.at(0, 1) == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(sol.test_channel.at(0, 0) == doctest::Approx(0.89).epsilon(1e-12));
  CHECK(sol.equivocation ==
        doctest::Approx(oracle::h2(0.11)).epsilon(1e-12));
  check_solution_invariants(sol, half);
}

TEST_CASE("reverse waterfilling on the outlier law") {
  const Pmf source(oracle::outlier_pmf());
  for (double d : {0.1, 0.25, 0.5}) {
    const auto sol = cat::reverse_waterfill(source, d);
    const auto want = oracle::lambda_scan_exhaustive(source.probs(), d);
    CHECK(sol.lambda == doctest::Approx(want.lambda).epsilon(1e-12));
    CHECK(sol.support == want.support);
    check_solution_invariants(sol, source);
  }
}

TEST_CASE("reverse waterfilling at the right endpoint") {
  // Tied maxima: the output law degenerates to uniform over the argmax set.
  const Pmf source(oracle::outlier_pmf());
  const double dmax = cat::d_max(source);
  const auto sol = cat::reverse_waterfill(source, dmax);
  CHECK(sol.support == std::vector<std::size_t>{0, 1});
  CHECK(sol.output_pmf[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.rate == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(sol.equivocation ==
        doctest::Approx(entropy(source)).epsilon(1e-10));
  check_stationarity(sol, source);

  // Unique maximum.
  const Pmf p({0.5, 0.3, 0.2});
  const auto s2 = cat::reverse_waterfill(p, cat::d_max(p));
  CHECK(s2.support == std::vector<std::size_t>{0});
  CHECK(s2.rate == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(s2.equivocation == doctest::Approx(entropy(p)).epsilon(1e-10));
  check_stationarity(s2, p);
}

TEST_CASE("gamma: closed form against the conditional-entropy oracle") {
  const Pmf source(oracle::outlier_pmf());
  CHECK(cat::gamma(source, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

  const Pmf half({0.5, 0.5});
  CHECK(cat::gamma(half, 0.11) ==
        doctest::Approx(oracle::h2(0.11)).epsilon(1e-12));

  for (double d : {0.1, 0.25, 0.5}) {
    const auto sol = cat::reverse_waterfill(source, d);
    const JointPmf joint = joint_of(source, sol.forward_channel);
    const std::size_t a0[] = {0}, a1[] = {1};
    CHECK(cat::gamma(source, d) ==
          doctest::Approx(conditional_entropy(joint, a0, a1)).epsilon(1e-10));
  }
}

TEST_CASE("up_curve endpoints, monotonicity, and concavity") {
  const Pmf source(oracle::outlier_pmf());
  const double h = entropy(source);
  const double dmax = cat::d_max(source);

  const double single[] = {0.0};
  const auto one = cat::up_curve(source, single);
  CHECK(one.size() == 1);
  CHECK(one[0].R == doctest::Approx(h).epsilon(1e-12));
  CHECK(one[0].E == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(dmax * i / 40.0);
  const auto curve = cat::up_curve(source, grid);
  CHECK(curve.front().R == doctest::Approx(h).epsilon(1e-10));
  CHECK(curve.front().E == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(curve.back().R == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(curve.back().E == doctest::Approx(h).epsilon(1e-10));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].R <= curve[i - 1].R + 1e-12);
    CHECK(curve[i].E >= curve[i - 1].E - 1e-12);
  }
  // Concavity of E(D) on the uniform grid.
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    CHECK(curve[i].E >= 0.5 * (curve[i - 1].E + curve[i + 1].E) - 1e-9);
  }

  const double bad[] = {0.1, dmax + 0.05};
  try {
    cat::up_curve(source, bad);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    // The message identifies the offending grid value.
    CHECK(std::string(e.what()).find(std::to_string(dmax + 0.05).substr(0, 6)) !=
          std::string::npos);
  }
}

TEST_CASE("binary curve equals the closed form") {
  const Pmf half({0.5, 0.5});
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.5 * i / 20.0);
  const auto curve = cat::up_curve(half, grid);
  for (const auto& pt : curve) {
    CHECK(pt.E == doctest::Approx(oracle::h2(pt.D)).epsilon(1e-12));
    CHECK(pt.R == doctest::Approx(1.0 - oracle::h2(pt.D)).epsilon(1e-12));
  }
}

TEST_CASE("support shrinks as distortion grows (random laws)") {
  std::mt19937_64 g(2026);
  for (int rep = 0; rep < 100; ++rep) {
    const Pmf p(oracle::random_pmf(g, 6));
    const double dmax = cat::d_max(p);
    std::uniform_real_distribution<double> u(0.0, dmax);
    double d1 = u(g), d2 = u(g);
    if (d1 > d2) std::swap(d1, d2);
    const auto s1 = cat::lambda_from_distortion(p, d1);
    const auto s2 = cat::lambda_from_distortion(p, d2);
    CHECK(s1.lambda <= s2.lambda + 1e-12);
    CHECK(std::includes(s1.support.begin(), s1.support.end(),
                        s2.support.begin(), s2.support.end()));
  }
}

TEST_CASE("stationarity holds on random laws and distortions") {
  std::mt19937_64 g(60221023);
  for (int rep = 0; rep < 100; ++rep) {
    const Pmf p(oracle::random_pmf(g, 5));
    std::uniform_real_distribution<double> u(0.0, cat::d_max(p));
    const auto sol = cat::reverse_waterfill(p, u(g));
    check_stationarity(sol, p);
  }
}

TEST_CASE("no random feasible channel beats the closed form") {
  const Pmf source(oracle::outlier_pmf());
  const std::size_t n = source.size();
  const double target = 0.25;
  const double gamma_ref = cat::gamma(source, target);
  std::mt19937_64 g(17);

  int checked = 0;
  while (checked < 1000) {
    auto m = oracle::random_channel(g, n, n);
    // Mix toward the identity to pin the distortion at the target exactly.
    double dist = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (x != y) dist += source[x] * m[x * n + y];
      }
    }
    if (dist < target) continue;
    const double t = target / dist;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        m[x * n + y] = t * m[x * n + y] + (1.0 - t) * (x == y ? 1.0 : 0.0);
      }
    }
    const Channel ch(n, n, std::move(m));
    const JointPmf joint = joint_of(source, ch);
    const std::size_t a0[] = {0}, a1[] = {1};
    const double equiv = conditional_entropy(joint, a0, a1);
    CHECK(equiv <= gamma_ref + 1e-9);
    ++checked;
  }
}
