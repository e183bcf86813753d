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

#include "upt/categorical.hpp"

#include <algorithm>
#include <cmath>

#include "upt/errors.hpp"
#include "upt/infotheory.hpp"
#include "upt/jsonutil.hpp"

namespace upt::categorical {

namespace {

constexpr double kEdgeTol = 1e-12;

double plogp(double p) { return p > kProbZeroEps ? p * std::log2(p) : 0.0; }

void check_domain(const Pmf& source, double D) {
  const double dm = d_max(source);
  if (!(D >= -kEdgeTol) || !(D <= dm + kEdgeTol)) {
    throw DomainError("distortion " + std::to_string(D) +
                          " outside [0, D_max]; D_max = " + std::to_string(dm),
                      0.0, dm);
  }
}

}  // namespace

double d_max(const Pmf& source) {
  double p_max = 0.0;
  for (double p : source.probs()) p_max = std::max(p_max, p);
  return 1.0 - p_max;
}

LambdaResult lambda_from_distortion(const Pmf& source, double D) {
  check_domain(source, D);
  const auto probs = source.probs();
  const std::size_t n = probs.size();
  const double dm = d_max(source);
  D = std::clamp(D, 0.0, dm);
  const double p_max = 1.0 - dm;

  if (D >= dm - kEdgeTol) {
    // Right endpoint: only the maximum-probability symbols survive. With a
    // unique maximum the water level is anywhere in [second_max, p_max); we
    // take the low end so lambda stays nondecreasing in D.
    LambdaResult res;
    double second = 0.0;
    double out_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (probs[i] == p_max) {
        res.support.push_back(i);
      } else {
        second = std::max(second, probs[i]);
        out_sum += probs[i];
      }
    }
    const std::size_t s = res.support.size() - 1;
    res.lambda = s >= 1 ? (D - out_sum) / static_cast<double>(s) : second;
    return res;
  }

  // Breakpoints at the distinct probability values. On the segment
  // lambda in [b_i, b_{i+1}) the support is fixed and D is affine in lambda.
  std::vector<double> distinct(probs.begin(), probs.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  double lo = 0.0;
  for (std::size_t b = 0; b <= distinct.size(); ++b) {
    if (b > 0) lo = distinct[b - 1];
    const double hi = b < distinct.size() ? distinct[b] : p_max;
    if (hi <= lo && b > 0) continue;

    std::size_t supp_count = 0;
    double out_sum = 0.0;
    for (double p : probs) {
      if (p > lo) {
        ++supp_count;
      } else {
        out_sum += p;
      }
    }
    if (supp_count <= 1) break;  // D(lambda) is constant at d_max from here
    const double s = static_cast<double>(supp_count - 1);
    const double lambda = (D - out_sum) / s;
    if (lambda >= lo - kEdgeTol && lambda < hi - kEdgeTol) {
      LambdaResult res;
      res.lambda = std::max(lambda, lo);
      for (std::size_t i = 0; i < n; ++i) {
        if (probs[i] > lo) res.support.push_back(i);
      }
      return res;
    }
  }
  throw Error("lambda_from_distortion: no segment matched (internal)");
}

WaterfillSolution reverse_waterfill(const Pmf& source, double D) {
  const auto probs = source.probs();
  const std::size_t n = probs.size();
  LambdaResult ls = lambda_from_distortion(source, D);
  D = std::clamp(D, 0.0, d_max(source));
  const double lambda = ls.lambda;
  const double d_bar = 1.0 - D;

  std::vector<bool> in_support(n, false);
  for (std::size_t i : ls.support) in_support[i] = true;

  // Output distribution: excess mass above the water level, normalized. A
  // zero denominator happens only at the right endpoint with tied maxima,
  // where the limit is uniform over the support.
  std::vector<double> q(n, 0.0);
  double denom = 0.0;
  for (std::size_t i : ls.support) denom += probs[i] - lambda;
  if (denom > kProbZeroEps) {
    for (std::size_t i : ls.support) q[i] = (probs[i] - lambda) / denom;
  } else {
    for (std::size_t i : ls.support) {
      q[i] = 1.0 / static_cast<double>(ls.support.size());
    }
  }

  std::vector<std::string> labels;
  if (source.has_labels()) labels = source.labels();

  // Test channel p(x|xhat): d_bar on the diagonal, lambda across the
  // support, the prior on suppressed symbols. Rows for suppressed xhat
  // (zero output mass) carry the source distribution.
  std::vector<double> test(n * n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      double v;
      if (!in_support[y]) {
        v = probs[x];
      } else if (x == y) {
        v = d_bar;
      } else if (in_support[x]) {
        v = lambda;
      } else {
        v = probs[x];
      }
      test[y * n + x] = v;
    }
  }

  // Forward channel p(xhat|x) by Bayes inversion; suppressed and zero-mass
  // inputs emit independently from q.
  std::vector<double> fwd(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    if (in_support[x] && probs[x] > kProbZeroEps) {
      for (std::size_t y : ls.support) {
        const double t = (x == y) ? d_bar : lambda;
        fwd[x * n + y] = q[y] * t / probs[x];
      }
    } else {
      for (std::size_t y = 0; y < n; ++y) fwd[x * n + y] = q[y];
    }
  }

  const std::size_t s = ls.support.size() - 1;
  double out_entropy = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!in_support[x]) out_entropy -= plogp(probs[x]);
  }
  const double equiv = -plogp(d_bar) -
                       static_cast<double>(s) * plogp(lambda) + out_entropy;
  const double rate = std::max(0.0, entropy(source) - equiv);

  WaterfillSolution sol{
      lambda,
      std::move(ls.support),
      s,
      Pmf(std::move(q), labels),
      Channel(n, n, std::move(test), labels, labels),
      Channel(n, n, std::move(fwd), labels, labels),
      D,
      equiv,
      rate};
  return sol;
}

nlohmann::json WaterfillSolution::to_json() const {
  nlohmann::json j;
  j["lambda"] = jreal(lambda);
  nlohmann::json supp = nlohmann::json::array();
  for (std::size_t i : support) supp.push_back(output_pmf.label(i));
  j["support"] = std::move(supp);
  j["support_size"] = support.size();
  j["D"] = jreal(distortion);
  j["gamma"] = jreal(equivocation);
  j["R"] = jreal(rate);
  return j;
}

double gamma(const Pmf& source, double D) {
  const auto probs = source.probs();
  LambdaResult ls = lambda_from_distortion(source, D);
  D = std::clamp(D, 0.0, d_max(source));
  std::vector<bool> in_support(probs.size(), false);
  for (std::size_t i : ls.support) in_support[i] = true;
  double out_entropy = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (!in_support[x]) out_entropy -= plogp(probs[x]);
  }
  const double s = static_cast<double>(ls.support.size() - 1);
  return -plogp(1.0 - D) - s * plogp(ls.lambda) + out_entropy;
}

TradeoffCurve up_curve(const Pmf& source, std::span<const double> grid) {
  const double dm = d_max(source);
  for (double d : grid) {
    if (!(d >= -1e-12) || !(d <= dm + 1e-12)) {
      throw DomainError("up_curve: grid value " + std::to_string(d) +
                            " outside [0, D_max]; D_max = " +
                            std::to_string(dm),
                        0.0, dm);
    }
  }
  const double h = entropy(source);
  TradeoffCurve curve;
  curve.reserve(grid.size());
  for (double d : grid) {
    const double g = gamma(source, d);
    const double r = std::max(0.0, h - g);
    curve.push_back(TradeoffPoint{std::clamp(d, 0.0, dm), r, g, r});
  }
  return curve;
}

}  // namespace upt::categorical
