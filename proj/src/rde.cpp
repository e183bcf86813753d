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

#include "upt/rde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upt/errors.hpp"
#include "upt/infotheory.hpp"
#include "upt/jsonutil.hpp"
#include "upt/kern.hpp"

namespace upt::rde {

namespace {

constexpr double kLogFloor = 1e-300;  // gradient-side floor, never in outputs
constexpr double kMuCap = 1e12;

// Problem compiled to composite alphabets: h indexes the private composite,
// r the public composite, e the encoding alphabet (= r under the Markov
// restriction, (h,r) pairs otherwise), y the output alphabet.
struct Compiled {
  std::size_t nh, nr, ne, ny;
  bool markov;
  std::vector<double> p2;  // nh x nr
  std::vector<double> ph;  // nh
  std::vector<double> pe;  // ne
  std::vector<double> A;   // nh x ne, joint mass of (h, e)
  std::vector<double> c;   // ne x ny, c[e][y] = sum_{(h,r):e} p2(h,r) rho(r,y)
  double hh;               // H(X_h)
  std::vector<std::string> enc_labels;
  std::vector<std::string> out_labels;
};

Compiled compile(const RdeProblem& prob) {
  const JointPmf& j = prob.joint;
  const auto& priv = j.private_axes();
  const auto& pub = j.public_axes();
  if (priv.empty() || pub.empty()) {
    throw DataError("rde: joint needs non-empty public and private axis sets");
  }

  Compiled C;
  C.markov = prob.markov_restricted;
  C.nh = 1;
  for (std::size_t a : priv) C.nh *= j.axis_size(a);
  C.nr = 1;
  for (std::size_t a : pub) C.nr *= j.axis_size(a);

  C.p2.assign(C.nh * C.nr, 0.0);
  for (std::size_t flat = 0; flat < j.cells(); ++flat) {
    const std::size_t h = j.composite_index(flat, priv);
    const std::size_t r = j.composite_index(flat, pub);
    C.p2[h * C.nr + r] += j.table()[flat];
  }
  C.ph.assign(C.nh, 0.0);
  std::vector<double> pr(C.nr, 0.0);
  for (std::size_t h = 0; h < C.nh; ++h) {
    for (std::size_t r = 0; r < C.nr; ++r) {
      C.ph[h] += C.p2[h * C.nr + r];
      pr[r] += C.p2[h * C.nr + r];
    }
  }
  C.hh = entropy(C.ph);

  std::vector<double> rho = prob.distortion;
  if (rho.empty()) {
    C.ny = C.nr;
    rho.assign(C.nr * C.nr, 1.0);
    for (std::size_t r = 0; r < C.nr; ++r) rho[r * C.nr + r] = 0.0;
  } else {
    if (rho.size() % C.nr != 0) {
      throw DataError("rde: distortion matrix rows must match |X_r|");
    }
    C.ny = rho.size() / C.nr;
    for (double v : rho) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DataError("rde: distortion entries must be finite and >= 0");
      }
    }
  }

  const auto pub_labels = j.composite_labels(pub);
  if (C.markov) {
    C.ne = C.nr;
    C.pe = pr;
    C.A.assign(C.nh * C.ne, 0.0);
    for (std::size_t h = 0; h < C.nh; ++h) {
      for (std::size_t r = 0; r < C.nr; ++r) {
        C.A[h * C.ne + r] = C.p2[h * C.nr + r];
      }
    }
    C.c.assign(C.ne * C.ny, 0.0);
    for (std::size_t e = 0; e < C.ne; ++e) {
      for (std::size_t y = 0; y < C.ny; ++y) {
        C.c[e * C.ny + y] = pr[e] * rho[e * C.ny + y];
      }
    }
    C.enc_labels = pub_labels;
  } else {
    C.ne = C.nh * C.nr;
    C.pe = C.p2;
    C.A.assign(C.nh * C.ne, 0.0);
    C.c.assign(C.ne * C.ny, 0.0);
    const auto priv_labels = j.composite_labels(priv);
    for (std::size_t h = 0; h < C.nh; ++h) {
      for (std::size_t r = 0; r < C.nr; ++r) {
        const std::size_t e = h * C.nr + r;
        C.A[h * C.ne + e] = C.p2[h * C.nr + r];
        for (std::size_t y = 0; y < C.ny; ++y) {
          C.c[e * C.ny + y] = C.p2[h * C.nr + r] * rho[r * C.ny + y];
        }
        C.enc_labels.push_back(priv_labels[h] + "|" + pub_labels[r]);
      }
    }
  }
  if (C.ny == C.nr) C.out_labels = pub_labels;
  return C;
}

struct Metrics {
  double leakage;
  double rate;
  double equivocation;
  double distortion;
};

void joint_hy(const Compiled& C, std::span<const double> W,
              std::vector<double>& P, std::vector<double>& Q) {
  P.assign(C.nh * C.ny, 0.0);
  for (std::size_t h = 0; h < C.nh; ++h) {
    for (std::size_t e = 0; e < C.ne; ++e) {
      const double a = C.A[h * C.ne + e];
      if (a == 0.0) continue;
      const double* row = W.data() + e * C.ny;
      double* dst = P.data() + h * C.ny;
      for (std::size_t y = 0; y < C.ny; ++y) dst[y] += a * row[y];
    }
  }
  Q.assign(C.ny, 0.0);
  for (std::size_t h = 0; h < C.nh; ++h) {
    for (std::size_t y = 0; y < C.ny; ++y) Q[y] += P[h * C.ny + y];
  }
}

Metrics eval_metrics(const Compiled& C, std::span<const double> W) {
  std::vector<double> P, Q;
  joint_hy(C, W, P, Q);
  std::vector<double> denom(C.nh * C.ny);
  for (std::size_t h = 0; h < C.nh; ++h) {
    for (std::size_t y = 0; y < C.ny; ++y) {
      denom[h * C.ny + y] = C.ph[h] * Q[y];
    }
  }
  Metrics m;
  m.leakage =
      std::max(0.0, kern::xlogr_sum(P, denom, kProbZeroEps, kLogFloor));
  double cond = 0.0;
  for (std::size_t e = 0; e < C.ne; ++e) {
    if (C.pe[e] == 0.0) continue;
    cond -= C.pe[e] * kern::plogp_sum(W.subspan(e * C.ny, C.ny), kProbZeroEps);
  }
  m.rate = std::max(0.0, entropy(Q) - cond);
  m.equivocation = std::max(0.0, C.hh - m.leakage);
  m.distortion = kern::dot(C.c, W);
  return m;
}

// Lagrangian objective: leakage + mu * distortion.
double lagrangian(const Compiled& C, std::span<const double> W, double mu) {
  const Metrics m = eval_metrics(C, W);
  return m.leakage + mu * m.distortion;
}

void leakage_gradient(const Compiled& C, std::span<const double> W, double mu,
                      std::vector<double>& G, std::vector<double>& P,
                      std::vector<double>& Q, std::vector<double>& logP,
                      std::vector<double>& logQ) {
  joint_hy(C, W, P, Q);
  logP.resize(P.size());
  logQ.resize(Q.size());
  for (double& v : P) {
    if (v < kLogFloor) v = kLogFloor;
  }
  for (double& v : Q) {
    if (v < kLogFloor) v = kLogFloor;
  }
  kern::log2_map(P, logP);
  kern::log2_map(Q, logQ);
  G.assign(C.ne * C.ny, 0.0);
  for (std::size_t h = 0; h < C.nh; ++h) {
    const double* lp = logP.data() + h * C.ny;
    for (std::size_t e = 0; e < C.ne; ++e) {
      const double a = C.A[h * C.ne + e];
      if (a == 0.0) continue;
      double* g = G.data() + e * C.ny;
      for (std::size_t y = 0; y < C.ny; ++y) g[y] += a * (lp[y] - logQ[y]);
    }
  }
  for (std::size_t i = 0; i < G.size(); ++i) G[i] += mu * C.c[i];
}

// Exact line search for the convex objective along W + t*Dir, t in
// [0, t_max]: bisection on the sign of the directional derivative.
double line_search(const Compiled& C, std::span<const double> W,
                   std::span<const double> Dir, double mu,
                   double t_max = 1.0) {
  std::vector<double> P0, Q0;
  joint_hy(C, W, P0, Q0);
  std::vector<double> dP, dQ;
  joint_hy(C, Dir, dP, dQ);  // linear map, so this is the joint of Dir
  const double cdir = kern::dot(C.c, Dir);

  std::vector<double> Pt(P0.size()), Qt(Q0.size()), logPt(P0.size()),
      logQt(Q0.size());
  auto dphi = [&](double t) {
    for (std::size_t i = 0; i < P0.size(); ++i) {
      Pt[i] = std::max(P0[i] + t * dP[i], kLogFloor);
    }
    for (std::size_t i = 0; i < Q0.size(); ++i) {
      Qt[i] = std::max(Q0[i] + t * dQ[i], kLogFloor);
    }
    kern::log2_map(Pt, logPt);
    kern::log2_map(Qt, logQt);
    return kern::dot(dP, logPt) - kern::dot(dQ, logQt) + mu * cdir;
  };

  if (dphi(0.0) >= 0.0) return 0.0;
  if (dphi(t_max) <= 0.0) return t_max;
  double lo = 0.0, hi = t_max;
  for (int it = 0; it < 70; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dphi(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct InnerResult {
  std::vector<double> W;
  double gap = 0.0;
  std::size_t iters = 0;
  bool converged = false;
};

// Exact linear minimization of <G, V> over the feasible set: rows on
// simplices with dot(c, V) <= budget. Without the budget the minimizer is
// the per-row argmin vertex; with it, rows are tilted by a multiplier
// theta on the distortion (bisected until feasible) and the leftover
// budget is spent reverting rows that switched at the critical theta --
// all such trades carry the same objective-per-distortion ratio, so the
// blend is the exact LP optimum up to the bisection width.
std::vector<double> lp_budget_vertex(const Compiled& C,
                                     std::span<const double> G,
                                     double budget) {
  const std::size_t ne = C.ne, ny = C.ny;
  auto choose = [&](double theta, std::vector<std::size_t>& pick) {
    double dist = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
      std::size_t best = 0;
      double best_v = G[e * ny] + theta * C.c[e * ny];
      double best_c = C.c[e * ny];
      for (std::size_t y = 1; y < ny; ++y) {
        const double v = G[e * ny + y] + theta * C.c[e * ny + y];
        const double cc = C.c[e * ny + y];
        if (v < best_v - 1e-18 ||
            (std::abs(v - best_v) <= 1e-18 && cc < best_c)) {
          best = y;
          best_v = v;
          best_c = cc;
        }
      }
      pick[e] = best;
      dist += best_c;
    }
    return dist;
  };

  std::vector<std::size_t> pick_lo(ne), pick_hi(ne), pick(ne);
  double dist0 = choose(0.0, pick_lo);
  std::vector<double> V(ne * ny, 0.0);
  if (dist0 <= budget) {
    for (std::size_t e = 0; e < ne; ++e) V[e * ny + pick_lo[e]] = 1.0;
    return V;
  }

  double th_lo = 0.0, th_hi = 1.0;
  double dist_hi = choose(th_hi, pick_hi);
  while (dist_hi > budget && th_hi < 1e18) {
    th_lo = th_hi;
    pick_lo = pick_hi;
    th_hi *= 4.0;
    dist_hi = choose(th_hi, pick_hi);
  }
  for (int it = 0; it < 200 && th_hi - th_lo > 1e-14 * th_hi; ++it) {
    const double mid = 0.5 * (th_lo + th_hi);
    const double d = choose(mid, pick);
    if (d > budget) {
      th_lo = mid;
      pick_lo = pick;
    } else {
      th_hi = mid;
      pick_hi = pick;
      dist_hi = d;
    }
  }

  for (std::size_t e = 0; e < ne; ++e) V[e * ny + pick_hi[e]] = 1.0;
  double leftover = budget - dist_hi;
  for (std::size_t e = 0; e < ne && leftover > 0.0; ++e) {
    if (pick_lo[e] == pick_hi[e]) continue;
    const double dc = C.c[e * ny + pick_lo[e]] - C.c[e * ny + pick_hi[e]];
    if (dc <= 0.0) continue;
    if (dc <= leftover) {
      V[e * ny + pick_hi[e]] = 0.0;
      V[e * ny + pick_lo[e]] = 1.0;
      leftover -= dc;
    } else {
      const double s = leftover / dc;
      V[e * ny + pick_hi[e]] = 1.0 - s;
      V[e * ny + pick_lo[e]] = s;
      leftover = 0.0;
    }
  }
  return V;
}

// Minimizes the convex leakage objective over the distortion-capped
// product of row simplices. Iterates move by multiplicative
// (exponentiated-gradient) steps with backtracking, which match the
// entropy geometry of the objective: they keep every entry strictly
// positive, so gradients stay finite and honest where additive
// Frank-Wolfe steps freeze against the log singularities at the faces.
// The distortion budget is enforced exactly after every step by the
// closed-form Bregman projection W <- normalize(W * 2^(-theta * c)) with
// the multiplier theta bisected until the budget binds. Convergence is
// certified by the Frank-Wolfe duality gap against the exact budgeted
// linear oracle, which is the KKT gap of the constrained problem.
InnerResult fw_constrained(const Compiled& C, double budget,
                           std::vector<double> W, std::size_t max_iters,
                           double gap_tol) {
  const std::size_t ne = C.ne, ny = C.ny;
  const std::size_t dim = ne * ny;

  // Strictly positive, feasible start.
  for (double& w : W) w = std::max(w, 1e-12);
  auto project_budget = [&](std::vector<double>& U) {
    // Row-normalize U * 2^(-theta*c); theta >= 0 chosen so the distortion
    // meets the budget. dist(theta) is nonincreasing.
    auto apply = [&](double theta, std::vector<double>& out) {
      double dist = 0.0;
      for (std::size_t e = 0; e < ne; ++e) {
        double tot = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
          const double v =
              U[e * ny + y] * std::exp2(std::max(-600.0, -theta * C.c[e * ny + y]));
          out[e * ny + y] = v;
          tot += v;
        }
        for (std::size_t y = 0; y < ny; ++y) {
          out[e * ny + y] /= tot;
          dist += C.c[e * ny + y] * out[e * ny + y];
        }
      }
      return dist;
    };
    std::vector<double> out(dim);
    if (apply(0.0, out) <= budget) {
      U = out;
      return;
    }
    double lo = 0.0, hi = 1.0;
    while (apply(hi, out) > budget && hi < 1e9) {
      lo = hi;
      hi *= 4.0;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (apply(mid, out) > budget) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    apply(hi, out);
    U = out;
  };
  project_budget(W);

  InnerResult res;
  std::vector<double> G, P, Q, logP, logQ;
  std::vector<double> trial(dim);
  double eta = 1.0;
  double cur_leak = eval_metrics(C, W).leakage;

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    res.iters = iter;
    leakage_gradient(C, W, /*mu=*/0.0, G, P, Q, logP, logQ);

    const std::vector<double> V = lp_budget_vertex(C, G, budget);
    double gap = 0.0;
    for (std::size_t i = 0; i < dim; ++i) gap += (W[i] - V[i]) * G[i];
    res.gap = gap;
    if (gap <= gap_tol) {
      res.converged = true;
      break;
    }

    // Constrained entropic mirror step with backtracking on the step size:
    // trial = normalize(W * 2^(-eta*G - theta*c)). The step size must be
    // uniform across rows; row-wise rescaling breaks descent once the
    // shared budget multiplier engages.
    bool improved = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double ex = std::clamp(-eta * G[i], -600.0, 600.0);
        trial[i] = W[i] * std::exp2(ex);
      }
      project_budget(trial);
      const double leak = eval_metrics(C, trial).leakage;
      if (leak < cur_leak - 1e-15) {
        W.swap(trial);
        cur_leak = leak;
        improved = true;
        eta = std::min(eta * 1.3, 1e6);
        break;
      }
      eta *= 0.5;
    }
    if (!improved) {
      // No decrease at any step size: numerically stationary.
      res.converged = gap <= gap_tol * 1e3;
      break;
    }
  }
  res.W = std::move(W);
  return res;
}

std::vector<double> default_init(const Compiled& C) {
  std::vector<double> W(C.ne * C.ny);
  for (std::size_t e = 0; e < C.ne; ++e) {
    const std::size_t diag = (C.markov ? e : e % C.nr) % C.ny;
    for (std::size_t y = 0; y < C.ny; ++y) {
      W[e * C.ny + y] = 0.5 / static_cast<double>(C.ny) +
                        (y == diag ? 0.5 : 0.0);
    }
  }
  return W;
}

std::vector<double> start_matrix(const Compiled& C, const SolveOptions& opts) {
  if (!opts.init) return default_init(C);
  if (opts.init->size() != C.ne * C.ny) {
    throw ArgumentError("rde: init matrix has wrong dimensions");
  }
  std::vector<double> W = *opts.init;
  for (std::size_t e = 0; e < C.ne; ++e) {
    double tot = 0.0;
    for (std::size_t y = 0; y < C.ny; ++y) {
      if (W[e * C.ny + y] < 0.0) {
        throw ArgumentError("rde: init matrix has negative entries");
      }
      tot += W[e * C.ny + y];
    }
    if (tot <= 0.0) throw ArgumentError("rde: init matrix has a zero row");
    for (std::size_t y = 0; y < C.ny; ++y) W[e * C.ny + y] /= tot;
  }
  return W;
}

void bounds_of(const Compiled& C, double* d_min, double* d_max) {
  double lo = 0.0;
  for (std::size_t e = 0; e < C.ne; ++e) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < C.ny; ++y) {
      m = std::min(m, C.c[e * C.ny + y]);
    }
    lo += m;
  }
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < C.ny; ++y) {
    double col = 0.0;
    for (std::size_t e = 0; e < C.ne; ++e) col += C.c[e * C.ny + y];
    hi = std::min(hi, col);
  }
  *d_min = lo;
  *d_max = hi;
}

RdeSolution finish(const Compiled& C, std::vector<double> W,
                   Objective objective, std::size_t iterations, double gap) {
  const Metrics m = eval_metrics(C, W);
  RdeSolution sol{Channel(C.ne, C.ny, std::move(W), C.enc_labels,
                          C.out_labels),
                  m.rate,
                  m.equivocation,
                  m.leakage,
                  m.distortion,
                  objective,
                  iterations,
                  gap};
  return sol;
}

std::vector<double> constant_channel(const Compiled& C) {
  std::size_t best = 0;
  double best_col = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < C.ny; ++y) {
    double col = 0.0;
    for (std::size_t e = 0; e < C.ne; ++e) col += C.c[e * C.ny + y];
    if (col < best_col) {
      best_col = col;
      best = y;
    }
  }
  std::vector<double> W(C.ne * C.ny, 0.0);
  for (std::size_t e = 0; e < C.ne; ++e) W[e * C.ny + best] = 1.0;
  return W;
}

std::vector<std::uint8_t> argmin_mask(const Compiled& C) {
  std::vector<std::uint8_t> mask(C.ne * C.ny, 0);
  for (std::size_t e = 0; e < C.ne; ++e) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < C.ny; ++y) {
      m = std::min(m, C.c[e * C.ny + y]);
    }
    for (std::size_t y = 0; y < C.ny; ++y) {
      mask[e * C.ny + y] = C.c[e * C.ny + y] <= m + 1e-15 ? 1 : 0;
    }
  }
  return mask;
}

void check_target(double target, double d_min, double d_max) {
  if (target < d_min - 1e-9) {
    throw DomainError("rde: target distortion " + std::to_string(target) +
                          " below feasible interval [" + std::to_string(d_min) +
                          ", " + std::to_string(d_max) + "]",
                      d_min, d_max);
  }
}

// ---------------------------------------------------------------------------
// Blahut-Arimoto for the min-rate objective at fixed slope s.

struct BaResult {
  std::vector<double> W;
  double gap = 0.0;
  std::size_t iters = 0;
  bool converged = false;
  double distortion = 0.0;
};

BaResult ba_solve(const Compiled& C, double s,
                  const std::vector<std::uint8_t>* mask,
                  std::vector<double> q, std::size_t max_iters,
                  double obj_tol, double gap_tol) {
  const std::size_t ne = C.ne, ny = C.ny;
  // Tilt kernel 2^{-s * d(e,y)}; zero-probability rows get a flat kernel.
  std::vector<double> K(ne * ny);
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t y = 0; y < ny; ++y) {
      double v;
      if (mask != nullptr && (*mask)[e * ny + y] == 0) {
        v = 0.0;
      } else if (C.pe[e] > 0.0) {
        v = std::exp2(-s * C.c[e * ny + y] / C.pe[e]);
      } else {
        v = 1.0;
      }
      K[e * ny + y] = v;
    }
  }

  BaResult res;
  std::vector<double> W(ne * ny), cnorm(ne), qn(ny);
  double prev_obj = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    res.iters = iter;
    for (std::size_t e = 0; e < ne; ++e) {
      cnorm[e] = kern::dot(q, std::span<const double>(K).subspan(e * ny, ny));
      if (cnorm[e] <= 0.0) cnorm[e] = 1.0;  // unreachable row
      for (std::size_t y = 0; y < ny; ++y) {
        W[e * ny + y] = q[y] * K[e * ny + y] / cnorm[e];
      }
    }
    std::fill(qn.begin(), qn.end(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
      for (std::size_t y = 0; y < ny; ++y) {
        qn[y] += C.pe[e] * W[e * ny + y];
      }
    }
    // Blahut bound: at the optimum T(y) <= 1 everywhere.
    double tmax = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      double t = 0.0;
      for (std::size_t e = 0; e < ne; ++e) {
        t += C.pe[e] * K[e * ny + y] / cnorm[e];
      }
      tmax = std::max(tmax, t);
    }
    res.gap = std::max(0.0, std::log2(tmax));
    const Metrics m = eval_metrics(C, W);
    const double obj = m.rate + s * m.distortion;
    const bool small_change = std::abs(prev_obj - obj) < obj_tol;
    prev_obj = obj;
    q = qn;
    if (res.gap <= gap_tol || small_change) {
      res.converged = res.gap <= gap_tol * 8 || small_change;
      break;
    }
  }
  res.W = std::move(W);
  res.distortion = kern::dot(C.c, res.W);
  return res;
}

}  // namespace

const char* objective_name(Objective o) {
  return o == Objective::max_equivocation ? "max_equivocation" : "min_rate";
}

void distortion_bounds(const RdeProblem& p, double* d_min, double* d_max) {
  const Compiled C = compile(p);
  bounds_of(C, d_min, d_max);
}

RdeSolution solve_max_equivocation(const RdeProblem& prob,
                                   const SolveOptions& opts) {
  const Compiled C = compile(prob);
  double d_min, d_max;
  bounds_of(C, &d_min, &d_max);
  const double target = prob.target_d;
  check_target(target, d_min, d_max);

  if (target >= d_max - 1e-12) {
    return finish(C, constant_channel(C), Objective::max_equivocation, 0, 0.0);
  }

  InnerResult r = fw_constrained(C, std::min(target, d_max),
                                 start_matrix(C, opts), opts.max_iterations,
                                 opts.gap_tol);
  if (!r.converged) {
    throw Error(
        "rde: max_equivocation hit the iteration cap; best gap = " +
        std::to_string(r.gap) + ", achieved distortion = " +
        std::to_string(kern::dot(C.c, r.W)));
  }
  return finish(C, std::move(r.W), Objective::max_equivocation, r.iters,
                r.gap);
}

RdeSolution solve_min_rate(const RdeProblem& prob, const SolveOptions& opts) {
  const Compiled C = compile(prob);
  double d_min, d_max;
  bounds_of(C, &d_min, &d_max);
  const double target = prob.target_d;
  check_target(target, d_min, d_max);

  if (target >= d_max - 1e-12) {
    return finish(C, constant_channel(C), Objective::min_rate, 0, 0.0);
  }

  std::vector<double> q0(C.ny, 1.0 / static_cast<double>(C.ny));
  std::size_t total_iters = 0;
  auto solve_at = [&](double s, const std::vector<std::uint8_t>* mask) {
    BaResult r = ba_solve(C, s, mask, q0, opts.max_iterations,
                          opts.objective_tol, std::min(opts.gap_tol, 1e-8));
    total_iters += r.iters;
    if (!r.converged) {
      throw Error("rde: Blahut-Arimoto hit the iteration cap at s = " +
                  std::to_string(s) + "; gap = " + std::to_string(r.gap));
    }
    return r;
  };

  if (target <= d_min + opts.distortion_tol) {
    const auto mask = argmin_mask(C);
    BaResult r = solve_at(0.0, &mask);
    return finish(C, std::move(r.W), Objective::min_rate, total_iters, r.gap);
  }

  double s_lo = 0.0;
  double s_hi = 1.0;
  std::vector<double> w_lo = constant_channel(C);
  double d_lo = kern::dot(C.c, w_lo);
  BaResult r_hi = solve_at(s_hi, nullptr);
  double d_hi = r_hi.distortion;
  while (d_hi > target && s_hi < 1e7) {
    s_lo = s_hi;
    w_lo = r_hi.W;
    d_lo = d_hi;
    s_hi *= 4.0;
    r_hi = solve_at(s_hi, nullptr);
    d_hi = r_hi.distortion;
  }
  if (d_hi > target) {
    throw Error("rde: slope cap reached before meeting the target");
  }

  double best_gap = r_hi.gap;
  for (int step = 0; step < 200; ++step) {
    if (std::abs(d_hi - target) <= opts.distortion_tol) break;
    if (s_hi - s_lo < 1e-13 * std::max(1.0, s_hi)) break;
    const double mid = 0.5 * (s_lo + s_hi);
    BaResult r = solve_at(mid, nullptr);
    if (r.distortion > target) {
      s_lo = mid;
      w_lo = r.W;
      d_lo = r.distortion;
    } else {
      s_hi = mid;
      r_hi = std::move(r);
      d_hi = r_hi.distortion;
      best_gap = r_hi.gap;
    }
  }

  std::vector<double> W = r_hi.W;
  if (std::abs(d_hi - target) > opts.distortion_tol && d_lo > d_hi) {
    const double t = (target - d_hi) / (d_lo - d_hi);
    for (std::size_t i = 0; i < W.size(); ++i) {
      W[i] = (1.0 - t) * r_hi.W[i] + t * w_lo[i];
    }
  }
  return finish(C, std::move(W), Objective::min_rate, total_iters, best_gap);
}

std::vector<RegionPoint> brute_force_region(const RdeProblem& prob,
                                            std::size_t grid_resolution) {
  const Compiled C = compile(prob);
  if (C.nh > 4 || C.nr > 4 || C.ne > 4 || C.ny > 4) {
    throw CapError("brute_force_region: alphabet sizes must be <= 4");
  }
  if (grid_resolution < 2 || grid_resolution > 21) {
    throw CapError("brute_force_region: grid_resolution must be in [2, 21]");
  }

  // All rows on the simplex grid {k/(g-1)}.
  const std::size_t units = grid_resolution - 1;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> counts(C.ny, 0);
  auto emit = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == C.ny) {
      counts[pos] = left;
      std::vector<double> row(C.ny);
      for (std::size_t y = 0; y < C.ny; ++y) {
        row[y] = static_cast<double>(counts[y]) / static_cast<double>(units);
      }
      rows.push_back(std::move(row));
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      counts[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  emit(emit, 0, units);

  double total = 1.0;
  for (std::size_t e = 0; e < C.ne; ++e) total *= rows.size();
  if (total > 2e6) {
    throw CapError("brute_force_region: " + std::to_string(total) +
                   " grid channels exceed the 2e6 cap (alphabets <= 4, "
                   "grid_resolution <= 21)");
  }

  std::vector<RegionPoint> region;
  region.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> odo(C.ne, 0);
  std::vector<double> W(C.ne * C.ny);
  for (;;) {
    for (std::size_t e = 0; e < C.ne; ++e) {
      std::copy(rows[odo[e]].begin(), rows[odo[e]].end(),
                W.begin() + e * C.ny);
    }
    const Metrics m = eval_metrics(C, W);
    region.push_back(RegionPoint{m.rate, m.distortion, m.equivocation});
    std::size_t k = 0;
    while (k < C.ne && ++odo[k] == rows.size()) {
      odo[k] = 0;
      ++k;
    }
    if (k == C.ne) break;
  }
  return region;
}

nlohmann::json RdeProblem::to_json() const {
  nlohmann::json j;
  j["joint"] = joint.to_json();
  j["target_d"] = jreal(target_d);
  j["markov_restricted"] = markov_restricted;
  if (!distortion.empty()) {
    // Row count equals the public composite alphabet size.
    std::size_t nr = 1;
    for (std::size_t a : joint.public_axes()) nr *= joint.axis_size(a);
    const std::size_t ny = distortion.size() / nr;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < nr; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t y = 0; y < ny; ++y) {
        row.push_back(jreal(distortion[r * ny + y]));
      }
      rows.push_back(std::move(row));
    }
    j["distortion"] = std::move(rows);
  }
  return j;
}

RdeProblem RdeProblem::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("joint")) {
    throw DataError("rde problem JSON must contain a \"joint\"");
  }
  RdeProblem p{JointPmf::from_json(j["joint"]), {}, 0.0, true};
  p.target_d = j.value("target_d", 0.0);
  p.markov_restricted = j.value("markov_restricted", true);
  if (j.contains("distortion")) {
    for (const auto& row : j["distortion"]) {
      for (const auto& v : row) p.distortion.push_back(v.get<double>());
    }
  }
  return p;
}

nlohmann::json RdeSolution::to_json() const {
  nlohmann::json j;
  j["objective"] = objective_name(objective);
  j["rate"] = jreal(rate);
  j["equivocation"] = jreal(equivocation);
  j["leakage"] = jreal(leakage);
  j["achieved_d"] = jreal(achieved_d);
  j["iterations"] = iterations;
  j["final_gap"] = jreal(final_gap);
  return j;
}

}  // namespace upt::rde
