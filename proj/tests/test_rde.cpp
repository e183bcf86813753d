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
#include "upt/rde.hpp"

using namespace upt;

namespace {

// Scalar source treated as its own private attribute: joint over (X, X)
// with a diagonal table.
rde::RdeProblem self_problem(const std::vector<double>& p, double target_d) {
  const std::size_t n = p.size();
  std::vector<double> table(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) table[i * n + i] = p[i];
  rde::RdeProblem prob{JointPmf({n, n}, std::move(table), {1}, {0}),
                       {},
                       target_d,
                       true};
  return prob;
}

void check_solution_invariants(const rde::RdeProblem& prob,
                               const rde::RdeSolution& sol) {
  CHECK(sol.achieved_d <= prob.target_d + 1e-8);
  // Equivocation and leakage split H(X_h).
  const auto& priv = prob.joint.private_axes();
  const double hh = entropy(prob.joint.marginal_table(priv));
  CHECK(std::abs(sol.equivocation + sol.leakage - hh) <= 1e-8);
  CHECK(sol.rate >= sol.leakage - 1e-8);
  for (std::size_t i = 0; i < sol.channel.n_in(); ++i) {
    double total = 0.0;
    for (double v : sol.channel.row(i)) total += v;
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

}  // namespace

TEST_CASE("binary source, Hamming: the closed forms are recovered") {
  const auto prob = self_problem({0.5, 0.5}, 0.11);

  const auto maxe = rde::solve_max_equivocation(prob);
  CHECK(maxe.equivocation ==
        doctest::Approx(oracle::h2(0.11)).epsilon(1e-5));
  CHECK(maxe.final_gap <= 1e-6);
  CHECK(std::abs(maxe.achieved_d - 0.11) <= 1e-6);
  check_solution_invariants(prob, maxe);

  const auto minr = rde::solve_min_rate(prob);
  CHECK(minr.rate ==
        doctest::Approx(1.0 - oracle::h2(0.11)).epsilon(1e-5));
  CHECK(minr.final_gap <= 1e-6);
  check_solution_invariants(prob, minr);
}

TEST_CASE("saturated distortion yields the constant channel") {
  auto prob = self_problem({0.5, 0.3, 0.2}, 0.9);
  const double hh = entropy(prob.joint.marginal_table(std::vector<std::size_t>{0}));

  const auto maxe = rde::solve_max_equivocation(prob);
  CHECK(maxe.equivocation == doctest::Approx(hh).epsilon(1e-12));
  CHECK(maxe.leakage == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(maxe.rate == doctest::Approx(0.0).epsilon(1e-12));

  const auto minr = rde::solve_min_rate(prob);
  CHECK(minr.rate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(minr.equivocation == doctest::Approx(hh).epsilon(1e-12));
}

TEST_CASE("solver matches the categorical closed form on the outlier law") {
  const auto p = oracle::outlier_pmf();
  const Pmf source(p);
  for (double d : {0.1, 0.25, 0.5}) {
    auto prob = self_problem(p, d);
    const auto sol = rde::solve_max_equivocation(prob);
    const double want = categorical::gamma(source, d);
    CHECK(sol.equivocation == doctest::Approx(want).epsilon(1e-4));
    CHECK(sol.final_gap <= 1e-6);
    check_solution_invariants(prob, sol);
  }
}

TEST_CASE("minimum-distortion edge uses the cheapest columns") {
  // Distortion floor forced above zero by a matrix without zero rows.
  auto prob = self_problem({0.6, 0.4}, 0.0);
  prob.distortion = {0.2, 1.0, 1.0, 0.3};  // d_min = 0.6*0.2 + 0.4*0.3 = 0.24
  double d_min, d_max;
  rde::distortion_bounds(prob, &d_min, &d_max);
  CHECK(d_min == doctest::Approx(0.24).epsilon(1e-12));

  prob.target_d = 0.1;
  CHECK_THROWS_AS(rde::solve_max_equivocation(prob), DomainError);

  prob.target_d = 0.24;
  const auto sol = rde::solve_max_equivocation(prob);
  CHECK(sol.achieved_d == doctest::Approx(0.24).epsilon(1e-9));
  // Only the diagonal is affordable, so the channel is the identity.
  CHECK(sol.channel.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.channel.at(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("random 3x3 problems: no sampled feasible channel does better") {
  std::mt19937_64 g(1234);
  const auto p = oracle::random_pmf(g, 3, 0.1);
  auto prob = self_problem(p, 0.2);

  const auto maxe = rde::solve_max_equivocation(prob);
  const auto minr = rde::solve_min_rate(prob);
  check_solution_invariants(prob, maxe);
  check_solution_invariants(prob, minr);
  CHECK(minr.equivocation <= maxe.equivocation + 1e-6);

  int tested = 0;
  while (tested < 10000) {
    const auto m = oracle::random_channel(g, 3, 3);
    double dist = 0.0;
    for (std::size_t x = 0; x < 3; ++x) {
      for (std::size_t y = 0; y < 3; ++y) {
        if (x != y) dist += p[x] * m[x * 3 + y];
      }
    }
    if (dist > 0.2) continue;
    ++tested;
    const Channel ch(3, 3, m);
    const JointPmf joint = joint_of(Pmf(p), ch);
    const std::size_t a0[] = {0}, a1[] = {1};
    const double equiv = conditional_entropy(joint, a0, a1);
    const double rate = mutual_information(joint, a0, a1);
    CHECK(equiv <= maxe.equivocation + 1e-5);
    CHECK(rate >= minr.rate - 1e-5);
  }
}

TEST_CASE("restart consistency: the objective is init-independent") {
  std::mt19937_64 g(777);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = oracle::random_pmf(g, 3, 0.05);
    std::uniform_real_distribution<double> u(0.1, 0.5);
    auto prob = self_problem(p, u(g));
    double d_min, d_max;
    rde::distortion_bounds(prob, &d_min, &d_max);
    prob.target_d = std::min(prob.target_d, 0.9 * d_max);

    double first = 0.0;
    for (int restart = 0; restart < 5; ++restart) {
      rde::SolveOptions opts;
      if (restart > 0) opts.init = oracle::random_channel(g, 3, 3, 0.02);
      const auto sol = rde::solve_max_equivocation(prob, opts);
      if (restart == 0) {
        first = sol.equivocation;
      } else {
        CHECK(std::abs(sol.equivocation - first) <= 1e-5);
      }
    }
  }
}

TEST_CASE("brute force: binary region endpoints and dominance") {
  auto prob = self_problem({0.5, 0.5}, 0.0);
  const auto region = rde::brute_force_region(prob, 21);
  CHECK(region.size() == 21 * 21);

  // The identity channel appears as the zero-distortion, full-rate corner.
  bool found_identity = false;
  for (const auto& pt : region) {
    if (std::abs(pt.D) <= 1e-12 && std::abs(pt.R - 1.0) <= 1e-12 &&
        std::abs(pt.E) <= 1e-12) {
      found_identity = true;
    }
    // No grid point exceeds the closed-form boundary.
    if (pt.D <= 0.5) {
      CHECK(pt.E <= oracle::h2(pt.D) + 1e-9);
    }
  }
  CHECK(found_identity);
}

TEST_CASE("brute force vs solver on a correlated 2x2 joint") {
  // p(h, r) with strong correlation.
  rde::RdeProblem prob{JointPmf({2, 2}, {0.4, 0.1, 0.1, 0.4}, {1}, {0}),
                       {},
                       0.0,
                       true};
  const auto region = rde::brute_force_region(prob, 21);

  for (double d : {0.1, 0.3}) {
    prob.target_d = d;
    const auto sol = rde::solve_max_equivocation(prob);
    double best = 0.0;
    for (const auto& pt : region) {
      if (pt.D <= d + 1e-9) best = std::max(best, pt.E);
    }
    // The enumerated boundary brackets the solver: the solver is at least
    // as good as the grid, and the grid gets within its resolution slack.
    CHECK(sol.equivocation >= best - 1e-6);
    CHECK(sol.equivocation <= best + 0.03);
  }
}

TEST_CASE("brute force size guards") {
  auto prob = self_problem({0.2, 0.2, 0.2, 0.2, 0.1, 0.1}, 0.1);
  CHECK_THROWS_AS(rde::brute_force_region(prob, 11), CapError);
  auto small = self_problem({0.5, 0.5}, 0.1);
  CHECK_THROWS_AS(rde::brute_force_region(small, 22), CapError);
  auto quad = self_problem({0.25, 0.25, 0.25, 0.25}, 0.1);
  CHECK_THROWS_AS(rde::brute_force_region(quad, 21), CapError);
}

TEST_CASE("markov restriction only shrinks the feasible set") {
  const JointPmf j({2, 2}, {0.35, 0.15, 0.1, 0.4}, {1}, {0});
  for (double d : {0.1, 0.25}) {
    rde::RdeProblem markov{j, {}, d, true};
    rde::RdeProblem free{j, {}, d, false};
    const auto sm = rde::solve_max_equivocation(markov);
    const auto sf = rde::solve_max_equivocation(free);
    CHECK(sf.equivocation >= sm.equivocation - 1e-5);
    const auto rm = rde::solve_min_rate(markov);
    const auto rf = rde::solve_min_rate(free);
    CHECK(rf.rate <= rm.rate + 1e-5);
  }
}

TEST_CASE("problem JSON round trip") {
  auto prob = self_problem({0.5, 0.5}, 0.11);
  prob.distortion = {0.0, 1.0, 1.0, 0.0};
  const auto j = prob.to_json();
  const auto back = rde::RdeProblem::from_json(j);
  CHECK(back.target_d == doctest::Approx(0.11));
  CHECK(back.markov_restricted == true);
  CHECK(back.distortion == prob.distortion);
  CHECK(back.joint.cells() == 4);
}
