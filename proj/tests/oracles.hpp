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

// Independent reference implementations used only by tests. Everything here
// is deliberately written without the library's kernels or solvers so that
// agreement is meaningful.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

// Direct long-double summation entropy (bits).
inline double entropy_direct(std::span<const double> p) {
  long double h = 0.0L;
  for (double v : p) {
    if (v > 0.0) h -= static_cast<long double>(v) * std::log2l(v);
  }
  return static_cast<double>(h);
}

inline double h2(double d) {
  if (d <= 0.0 || d >= 1.0) return 0.0;
  return -d * std::log2(d) - (1.0 - d) * std::log2(1.0 - d);
}

// H(X|Y) for a row-major joint table p(x, y) by direct summation.
inline double cond_entropy_direct(std::span<const double> joint,
                                  std::size_t nx, std::size_t ny) {
  long double h_joint = 0.0L, h_y = 0.0L;
  for (std::size_t y = 0; y < ny; ++y) {
    long double py = 0.0L;
    for (std::size_t x = 0; x < nx; ++x) {
      const double v = joint[x * ny + y];
      if (v > 0.0) h_joint -= static_cast<long double>(v) * std::log2l(v);
      py += v;
    }
    if (py > 0.0L) h_y -= py * std::log2l(static_cast<double>(py));
  }
  return static_cast<double>(h_joint - h_y);
}

struct LambdaSupport {
  double lambda = 0.0;
  std::vector<std::size_t> support;
};

// Water level by exhaustive enumeration of every candidate support set,
// checking p(x) > lambda inside and p(x) <= lambda outside. Independent of
// the breakpoint scan used by the library.
inline LambdaSupport lambda_scan_exhaustive(std::span<const double> p,
                                            double D) {
  const std::size_t n = p.size();
  if (n > 20) throw std::runtime_error("lambda_scan_exhaustive: too large");
  double pmax = 0.0;
  for (double v : p) pmax = std::max(pmax, v);
  const double dmax = 1.0 - pmax;

  if (std::abs(D - dmax) <= 1e-12) {
    LambdaSupport r;
    double second = 0.0, out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] == pmax) {
        r.support.push_back(i);
      } else {
        second = std::max(second, p[i]);
        out += p[i];
      }
    }
    const std::size_t s = r.support.size() - 1;
    r.lambda = s >= 1 ? (D - out) / static_cast<double>(s) : second;
    return r;
  }

  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> supp;
    double out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        supp.push_back(i);
      } else {
        out += p[i];
      }
    }
    const std::size_t s = supp.size() - 1;
    double lambda;
    if (s == 0) {
      continue;  // constant-distortion stretch, only reachable at dmax
    }
    lambda = (D - out) / static_cast<double>(s);
    if (lambda < -1e-12) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool inside = (mask & (1u << i)) != 0;
      if (inside && !(p[i] > lambda + 1e-12)) ok = false;
      if (!inside && !(p[i] <= lambda + 1e-12)) ok = false;
    }
    if (ok) return LambdaSupport{std::max(lambda, 0.0), std::move(supp)};
  }
  throw std::runtime_error("lambda_scan_exhaustive: no support set matched");
}

// Differential entropy -int f log2 f of a bivariate normal by Simpson
// quadrature on [-10 sigma, 10 sigma]^2.
inline double gauss2_entropy_quadrature(double var_a, double var_b,
                                        double cov, int steps = 800) {
  const double det = var_a * var_b - cov * cov;
  if (det <= 0.0) throw std::runtime_error("degenerate covariance");
  const double ia = var_b / det, ib = var_a / det, ic = -cov / det;
  const double norm = 1.0 / (2.0 * M_PI * std::sqrt(det));
  const double la = 10.0 * std::sqrt(var_a), lb = 10.0 * std::sqrt(var_b);
  const double ha = 2.0 * la / steps, hb = 2.0 * lb / steps;

  auto w1 = [&](int i) {
    if (i == 0 || i == steps) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
  };
  long double acc = 0.0L;
  for (int i = 0; i <= steps; ++i) {
    const double a = -la + ha * i;
    for (int j = 0; j <= steps; ++j) {
      const double b = -lb + hb * j;
      const double q = ia * a * a + ib * b * b + 2.0 * ic * a * b;
      const double f = norm * std::exp(-0.5 * q);
      if (f > 0.0) {
        acc += static_cast<long double>(w1(i) * w1(j)) * (-f * std::log2(f));
      }
    }
  }
  return static_cast<double>(acc * (ha / 3.0) * (hb / 3.0));
}

inline double gauss1_entropy_quadrature(double var, int steps = 20000) {
  const double l = 10.0 * std::sqrt(var);
  const double h = 2.0 * l / steps;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
  long double acc = 0.0L;
  for (int i = 0; i <= steps; ++i) {
    const double x = -l + h * i;
    const double f = norm * std::exp(-0.5 * x * x / var);
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    if (f > 0.0) acc += static_cast<long double>(w) * (-f * std::log2(f));
  }
  return static_cast<double>(acc * h / 3.0);
}

// I(A; B) of a bivariate normal via quadrature differential entropies.
inline double gauss_mi_quadrature(double var_a, double var_b, double cov) {
  return gauss1_entropy_quadrature(var_a) + gauss1_entropy_quadrature(var_b) -
         gauss2_entropy_quadrature(var_a, var_b, cov);
}

// Random distributions for property tests (mt19937_64, test-only).
inline std::vector<double> random_pmf(std::mt19937_64& g, std::size_t n,
                                      double min_mass = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double tot = 0.0;
  for (auto& v : p) {
    v = e(g) + min_mass;
    tot += v;
  }
  for (auto& v : p) v /= tot;
  return p;
}

inline std::vector<double> random_channel(std::mt19937_64& g, std::size_t n_in,
                                          std::size_t n_out,
                                          double min_mass = 0.0) {
  std::vector<double> m(n_in * n_out);
  for (std::size_t i = 0; i < n_in; ++i) {
    const auto row = random_pmf(g, n_out, min_mass);
    std::copy(row.begin(), row.end(), m.begin() + i * n_out);
  }
  return m;
}

// The categorical source used across the test suite: a discrete law with a
// heavy head and a thin outlier tail (normalized from the textbook weights
// 0.25, 0.25, 0.15, 0.1, 0.04, 0.005, 0.003, 0.002).
inline std::vector<double> outlier_pmf() {
  std::vector<double> raw{0.25, 0.25, 0.15, 0.1, 0.04, 0.005, 0.003, 0.002};
  double tot = 0.0;
  for (double v : raw) tot += v;
  for (double& v : raw) v /= tot;
  return raw;
}

}  // namespace oracle
