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

#include "upt/qnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "upt/errors.hpp"
#include "upt/infotheory.hpp"
#include "upt/jsonutil.hpp"
#include "upt/kern.hpp"
#include "upt/rng.hpp"
#include "upt/threads.hpp"

namespace upt::qnb {

namespace {

constexpr double kNegInf = -1e30;  // log-likelihood of an impossible letter

struct Sim {
  std::size_t nx = 1, nz = 1, nh = 1, nr = 1, nu = 1, nxhat = 1;
  bool has_z = false;
  std::vector<double> pxz;   // nx x nz
  std::vector<double> px;    // nx
  std::vector<double> pu;    // nu
  std::vector<double> pxu;   // nx x nu (statistically informed typicality)
  std::vector<double> pxzu;  // nx x nz x nu (informed typicality)
  std::vector<double> puz;   // nu x nz (decoder typicality/likelihood)
  std::vector<double> log_puz;
  std::vector<double> log_enc;  // log of pxu (SI) or pxzu (informed)
  std::vector<std::uint32_t> h_of_x, r_of_x;
  std::vector<double> pxz_cdf;
  double i_enc_u = 0.0;
  double i_uz = 0.0;
  double h_h_uz = 0.0;  // H(X_h | U, Z)
};

Sim compile(const CodingConfig& cfg) {
  const JointPmf& src = cfg.source;
  Sim S;
  if (cfg.z_axis) {
    if (*cfg.z_axis >= src.rank()) {
      throw DataError("qnb: z axis out of range");
    }
    S.has_z = true;
    S.nz = src.axis_size(*cfg.z_axis);
  }

  std::vector<std::size_t> noz_axes;
  for (std::size_t a = 0; a < src.rank(); ++a) {
    if (!cfg.z_axis || a != *cfg.z_axis) noz_axes.push_back(a);
  }
  if (noz_axes.empty()) throw DataError("qnb: no encoded attributes");
  S.nx = 1;
  for (std::size_t a : noz_axes) S.nx *= src.axis_size(a);

  // Effective hidden/public sets among the non-z axes.
  auto effective = [&](const std::vector<std::size_t>& set) {
    std::vector<std::size_t> eff;
    for (std::size_t a : set) {
      if (!cfg.z_axis || a != *cfg.z_axis) eff.push_back(a);
    }
    return eff;
  };
  const auto priv = effective(src.private_axes());
  const auto pub = effective(src.public_axes());
  if (priv.empty() || pub.empty()) {
    throw DataError("qnb: need non-z private and public attributes");
  }
  S.nh = 1;
  for (std::size_t a : priv) S.nh *= src.axis_size(a);
  S.nr = 1;
  for (std::size_t a : pub) S.nr *= src.axis_size(a);

  // pxz and the x -> (h, r) composite maps.
  S.pxz.assign(S.nx * S.nz, 0.0);
  S.h_of_x.assign(S.nx, 0);
  S.r_of_x.assign(S.nx, 0);
  std::vector<std::size_t> coords(src.rank());
  for (std::size_t flat = 0; flat < src.cells(); ++flat) {
    src.coords_of(flat, coords);
    std::size_t x = 0;
    for (std::size_t a : noz_axes) x = x * src.axis_size(a) + coords[a];
    const std::size_t z = cfg.z_axis ? coords[*cfg.z_axis] : 0;
    S.pxz[x * S.nz + z] += src.table()[flat];
    std::size_t h = 0;
    for (std::size_t a : priv) h = h * src.axis_size(a) + coords[a];
    std::size_t r = 0;
    for (std::size_t a : pub) r = r * src.axis_size(a) + coords[a];
    S.h_of_x[x] = static_cast<std::uint32_t>(h);
    S.r_of_x[x] = static_cast<std::uint32_t>(r);
  }

  // Auxiliary channel and the joint p(x, z, u).
  S.nu = cfg.aux.n_out();
  const std::size_t want_rows = cfg.informed ? S.nx * S.nz : S.nx;
  if (cfg.aux.n_in() != want_rows) {
    throw DataError("qnb: aux channel has " + std::to_string(cfg.aux.n_in()) +
                    " rows, expected " + std::to_string(want_rows));
  }
  S.pxzu.assign(S.nx * S.nz * S.nu, 0.0);
  for (std::size_t x = 0; x < S.nx; ++x) {
    for (std::size_t z = 0; z < S.nz; ++z) {
      const double w = S.pxz[x * S.nz + z];
      const auto row = cfg.aux.row(cfg.informed ? x * S.nz + z : x);
      for (std::size_t u = 0; u < S.nu; ++u) {
        S.pxzu[(x * S.nz + z) * S.nu + u] = w * row[u];
      }
    }
  }
  S.px.assign(S.nx, 0.0);
  S.pu.assign(S.nu, 0.0);
  S.pxu.assign(S.nx * S.nu, 0.0);
  S.puz.assign(S.nu * S.nz, 0.0);
  std::vector<double> pz(S.nz, 0.0);
  for (std::size_t x = 0; x < S.nx; ++x) {
    for (std::size_t z = 0; z < S.nz; ++z) {
      S.px[x] += S.pxz[x * S.nz + z];
      pz[z] += S.pxz[x * S.nz + z];
      for (std::size_t u = 0; u < S.nu; ++u) {
        const double v = S.pxzu[(x * S.nz + z) * S.nu + u];
        S.pu[u] += v;
        S.pxu[x * S.nu + u] += v;
        S.puz[u * S.nz + z] += v;
      }
    }
  }

  const double hu = entropy(S.pu);
  if (cfg.informed) {
    S.i_enc_u = std::max(0.0, entropy(S.pxz) + hu - entropy(S.pxzu));
  } else {
    S.i_enc_u = std::max(0.0, entropy(S.px) + hu - entropy(S.pxu));
  }
  S.i_uz = std::max(0.0, hu + entropy(pz) - entropy(S.puz));

  // H(X_h | U, Z) from p(h, u, z).
  std::vector<double> phuz(S.nh * S.nu * S.nz, 0.0);
  for (std::size_t x = 0; x < S.nx; ++x) {
    for (std::size_t z = 0; z < S.nz; ++z) {
      for (std::size_t u = 0; u < S.nu; ++u) {
        phuz[(S.h_of_x[x] * S.nu + u) * S.nz + z] +=
            S.pxzu[(x * S.nz + z) * S.nu + u];
      }
    }
  }
  S.h_h_uz = std::max(0.0, entropy(phuz) - entropy(S.puz));

  // Reconstruction and distortion tables.
  if (cfg.recon.empty()) {
    S.nxhat = S.nu;
    if (cfg.distortion.empty() && S.nu != S.nr) {
      throw DataError(
          "qnb: default reconstruction xhat = u needs |U| == |X_r|");
    }
  } else {
    if (cfg.recon.size() != S.nu * S.nz) {
      throw DataError("qnb: recon table must be |U| x |Z|");
    }
    S.nxhat = S.nr;
    for (std::uint32_t v : cfg.recon) {
      if (v >= S.nr) throw DataError("qnb: recon value outside |X_r|");
    }
  }
  if (!cfg.distortion.empty() && cfg.distortion.size() % S.nr != 0) {
    throw DataError("qnb: distortion matrix rows must match |X_r|");
  }

  S.log_puz.assign(S.puz.size(), kNegInf);
  for (std::size_t i = 0; i < S.puz.size(); ++i) {
    if (S.puz[i] > 0.0) S.log_puz[i] = std::log2(S.puz[i]);
  }
  const auto& enc_joint = cfg.informed ? S.pxzu : S.pxu;
  S.log_enc.assign(enc_joint.size(), kNegInf);
  for (std::size_t i = 0; i < enc_joint.size(); ++i) {
    if (enc_joint[i] > 0.0) S.log_enc[i] = std::log2(enc_joint[i]);
  }

  S.pxz_cdf.resize(S.pxz.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < S.pxz.size(); ++i) {
    acc += S.pxz[i];
    S.pxz_cdf[i] = acc;
  }
  S.pxz_cdf.back() = 1.0;
  return S;
}

// Letter-frequency (strong) typicality of the paired sequences against the
// joint law: every cell's empirical frequency within delta.
bool typical(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
             std::span<const double> joint, std::size_t nb, double delta,
             std::vector<std::uint32_t>& scratch) {
  scratch.assign(joint.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) scratch[a[i] * nb + b[i]]++;
  const double inv_n = 1.0 / static_cast<double>(a.size());
  for (std::size_t c = 0; c < joint.size(); ++c) {
    if (std::abs(static_cast<double>(scratch[c]) * inv_n - joint[c]) > delta) {
      return false;
    }
  }
  return true;
}

struct EncState {
  std::vector<std::uint32_t> pair;  // encoding-variable sequence
  std::vector<std::uint32_t> counts;
};

// Encoding-side view: the encoding variable is x (SI) or the (x, z) pair
// (informed encoder).
void fill_enc_seq(const Sim& S, const CodingConfig& cfg,
                  std::span<const std::uint32_t> x_seq,
                  std::span<const std::uint32_t> z_seq, EncState& st) {
  st.pair.resize(x_seq.size());
  if (cfg.informed) {
    for (std::size_t i = 0; i < x_seq.size(); ++i) {
      st.pair[i] = x_seq[i] * static_cast<std::uint32_t>(S.nz) +
                   (z_seq.empty() ? 0 : z_seq[i]);
    }
  } else {
    std::copy(x_seq.begin(), x_seq.end(), st.pair.begin());
  }
}

EncodeOutcome encode_impl(const Sim& S, const CodingConfig& cfg,
                          std::span<const std::uint32_t> x_seq,
                          std::span<const std::uint32_t> z_seq,
                          const Codebook& cb, EncState& st) {
  if (x_seq.size() != cb.n) {
    throw ArgumentError("qnb encode: sequence length != blocklength");
  }
  fill_enc_seq(S, cfg, x_seq, z_seq, st);
  const auto& joint = cfg.informed ? S.pxzu : S.pxu;
  for (std::size_t w = 0; w < cb.M; ++w) {
    if (typical(st.pair, cb.word(w), joint, S.nu, cfg.typicality_delta,
                st.counts)) {
      return EncodeOutcome{true, w, cb.bin_of(w)};
    }
  }
  return EncodeOutcome{false, 0, 0};
}

std::size_t ml_codeword(const Sim& S, const Codebook& cb,
                        std::span<const std::uint32_t> enc_seq) {
  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < cb.M; ++w) {
    const auto word = cb.word(w);
    double ll = 0.0;
    for (std::size_t i = 0; i < cb.n; ++i) {
      ll += S.log_enc[enc_seq[i] * S.nu + word[i]];
    }
    if (ll > best_ll) {
      best_ll = ll;
      best = w;
    }
  }
  return best;
}

std::size_t decode_impl(const Sim& S, const CodingConfig& cfg, std::size_t bin,
                        std::span<const std::uint32_t> z_seq,
                        const Codebook& cb, EncState& st) {
  if (bin >= cb.bins) throw ArgumentError("qnb decode: bin out of range");
  // Bin members form a consecutive range.
  std::size_t lo = 0;
  while (lo < cb.M && cb.bin_of(lo) < bin) ++lo;
  std::size_t hi = lo;
  while (hi < cb.M && cb.bin_of(hi) == bin) ++hi;
  if (lo == hi) throw Error("qnb decode: empty bin (internal)");

  auto likelihood = [&](std::size_t w) {
    const auto word = cb.word(w);
    double ll = 0.0;
    for (std::size_t i = 0; i < cb.n; ++i) {
      ll += S.log_puz[word[i] * S.nz + (z_seq.empty() ? 0 : z_seq[i])];
    }
    return ll;
  };

  std::size_t only_typical = cb.M;
  std::size_t n_typical = 0;
  std::size_t best_typ = cb.M;
  double best_typ_ll = -std::numeric_limits<double>::infinity();
  std::size_t best_any = cb.M;
  double best_any_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t w = lo; w < hi; ++w) {
    const double ll = likelihood(w);
    if (ll > best_any_ll) {
      best_any_ll = ll;
      best_any = w;
    }
    if (S.has_z &&
        typical(cb.word(w), z_seq, S.puz, S.nz, cfg.typicality_delta,
                st.counts)) {
      ++n_typical;
      only_typical = w;
      if (ll > best_typ_ll) {
        best_typ_ll = ll;
        best_typ = w;
      }
    }
  }
  if (n_typical == 1) return only_typical;
  if (n_typical > 1) return best_typ;
  return best_any;
}

double pow_or_inf(std::size_t base, std::size_t exp) {
  return std::pow(static_cast<double>(base), static_cast<double>(exp));
}

}  // namespace

Codebook build_codebook(const CodingConfig& cfg, std::size_t n) {
  if (n < 2) throw DataError("qnb: blocklength must be >= 2");
  const Sim S = compile(cfg);
  const double nd = static_cast<double>(n);
  const double exp_m = nd * (S.i_enc_u + cfg.rate_margin);
  if (exp_m > 20.0) {
    throw CapError("qnb: codebook size M = 2^" + std::to_string(exp_m) +
                   " exceeds the 2^20 cap");
  }
  const double exp_b =
      nd * (std::max(0.0, S.i_enc_u - S.i_uz) + cfg.rate_margin);

  Codebook cb;
  cb.n = n;
  cb.M = static_cast<std::size_t>(std::ceil(std::exp2(exp_m)));
  cb.bins = std::min(
      cb.M, static_cast<std::size_t>(std::ceil(std::exp2(exp_b))));
  if (cb.M > kSizeCap || cb.bins > kSizeCap) {
    throw CapError("qnb: codebook size " + std::to_string(cb.M) +
                   " exceeds the 2^20 cap");
  }

  std::vector<double> cdf(S.nu);
  double acc = 0.0;
  for (std::size_t u = 0; u < S.nu; ++u) {
    acc += S.pu[u];
    cdf[u] = acc;
  }
  cdf.back() = 1.0;

  Rng rng(mix64(mix64(cfg.seed, 0xC0DEB00Cull), n));
  cb.symbols.resize(cb.M * n);
  for (auto& s : cb.symbols) {
    const double v = rng.next_double();
    s = static_cast<std::uint32_t>(
        std::upper_bound(cdf.begin(), cdf.end(), v) - cdf.begin());
    if (s >= S.nu) s = static_cast<std::uint32_t>(S.nu - 1);
  }
  return cb;
}

EncodeOutcome encode(const CodingConfig& cfg,
                     std::span<const std::uint32_t> x_seq,
                     std::span<const std::uint32_t> z_seq,
                     const Codebook& cb) {
  const Sim S = compile(cfg);
  EncState st;
  return encode_impl(S, cfg, x_seq, z_seq, cb, st);
}

std::size_t decode(const CodingConfig& cfg, std::size_t bin,
                   std::span<const std::uint32_t> z_seq, const Codebook& cb) {
  const Sim S = compile(cfg);
  EncState st;
  return decode_impl(S, cfg, bin, z_seq, cb, st);
}

ExperimentSummary run_experiment(const CodingConfig& cfg, std::size_t n) {
  const Sim S = compile(cfg);
  const Codebook cb = build_codebook(cfg, n);

  ExperimentSummary sum;
  sum.n = n;
  sum.M = cb.M;
  sum.bins = cb.bins;
  sum.trials = cfg.trials;
  sum.rate_bits = std::log2(static_cast<double>(cb.bins)) /
                  static_cast<double>(n);
  sum.analytic_equiv = S.h_h_uz;
  sum.outcomes.resize(cfg.trials);

  parallel_for(cfg.trials, [&](std::size_t begin, std::size_t end) {
    EncState st;
    std::vector<std::uint32_t> x_seq(n), z_seq(n), xhat(n);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(mix64(mix64(cfg.seed, 0x7217A115ull ^ n), t));
      for (std::size_t i = 0; i < n; ++i) {
        const double v = rng.next_double();
        const std::size_t flat = static_cast<std::size_t>(
            std::upper_bound(S.pxz_cdf.begin(), S.pxz_cdf.end(), v) -
            S.pxz_cdf.begin());
        const std::size_t safe = std::min(flat, S.pxz_cdf.size() - 1);
        x_seq[i] = static_cast<std::uint32_t>(safe / S.nz);
        z_seq[i] = static_cast<std::uint32_t>(safe % S.nz);
      }

      TrialOutcome& out = sum.outcomes[t];
      const EncodeOutcome enc = encode_impl(S, cfg, x_seq, z_seq, cb, st);
      std::size_t w_sent;
      if (enc.ok) {
        w_sent = enc.w;
      } else {
        out.encode_failed = true;
        fill_enc_seq(S, cfg, x_seq, z_seq, st);
        w_sent = ml_codeword(S, cb, st.pair);
      }
      const std::size_t bin = cb.bin_of(w_sent);
      const std::size_t w_hat = decode_impl(S, cfg, bin, z_seq, cb, st);
      out.decoded_ok = w_hat == w_sent;
      out.bin_index = bin;
      out.codeword_index = w_sent;

      const auto word = cb.word(w_hat);
      double dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t u = word[i];
        const std::uint32_t xh =
            cfg.recon.empty() ? u : cfg.recon[u * S.nz + z_seq[i]];
        const std::uint32_t r = S.r_of_x[x_seq[i]];
        if (cfg.distortion.empty()) {
          dist += (xh == r) ? 0.0 : 1.0;
        } else {
          dist += cfg.distortion[r * S.nxhat + xh];
        }
      }
      out.distortion = dist / static_cast<double>(n);
    }
  });

  std::size_t errors = 0, failures = 0;
  double dist_sum = 0.0;
  for (const auto& o : sum.outcomes) {
    errors += o.decoded_ok ? 0 : 1;
    failures += o.encode_failed ? 1 : 0;
    dist_sum += o.distortion;
  }
  const double tn = static_cast<double>(cfg.trials);
  sum.err_rate = static_cast<double>(errors) / tn;
  sum.enc_failure_rate = static_cast<double>(failures) / tn;
  sum.mean_distortion = dist_sum / tn;

  // Plug-in equivocation (1/n) H(X_h^n | J, Z^n) by exact enumeration of
  // all source/side-information sequence pairs, when small enough.
  sum.plugin_equiv = std::numeric_limits<double>::quiet_NaN();
  const double n_pairs = pow_or_inf(S.nx, n) * pow_or_inf(S.nz, n);
  if (n_pairs <= static_cast<double>(kSizeCap)) {
    const std::size_t nxn =
        static_cast<std::size_t>(std::llround(pow_or_inf(S.nx, n)));
    const std::size_t nzn =
        static_cast<std::size_t>(std::llround(pow_or_inf(S.nz, n)));
    EncState st;
    std::vector<std::uint32_t> x_seq(n), z_seq(n);
    std::vector<double> pjz(cb.bins * nzn, 0.0);
    const bool h_is_x = S.nh == S.nx;
    std::unordered_map<std::uint64_t, double> phjz;

    for (std::size_t xi = 0; xi < nxn; ++xi) {
      std::size_t rem = xi;
      std::uint64_t h_idx = 0;
      for (std::size_t i = n; i-- > 0;) {
        x_seq[i] = static_cast<std::uint32_t>(rem % S.nx);
        rem /= S.nx;
      }
      for (std::size_t i = 0; i < n; ++i) {
        h_idx = h_idx * S.nh + S.h_of_x[x_seq[i]];
      }
      // For the statistically informed encoder the index depends on x only.
      std::size_t j_cached = 0;
      if (!cfg.informed) {
        const EncodeOutcome enc =
            encode_impl(S, cfg, x_seq, z_seq, cb, st);
        std::size_t w = enc.w;
        if (!enc.ok) {
          fill_enc_seq(S, cfg, x_seq, z_seq, st);
          w = ml_codeword(S, cb, st.pair);
        }
        j_cached = cb.bin_of(w);
      }
      for (std::size_t zi = 0; zi < nzn; ++zi) {
        std::size_t zrem = zi;
        for (std::size_t i = n; i-- > 0;) {
          z_seq[i] = static_cast<std::uint32_t>(zrem % S.nz);
          zrem /= S.nz;
        }
        double p = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          p *= S.pxz[x_seq[i] * S.nz + z_seq[i]];
        }
        if (p == 0.0) continue;
        std::size_t j = j_cached;
        if (cfg.informed) {
          const EncodeOutcome enc =
              encode_impl(S, cfg, x_seq, z_seq, cb, st);
          std::size_t w = enc.w;
          if (!enc.ok) {
            fill_enc_seq(S, cfg, x_seq, z_seq, st);
            w = ml_codeword(S, cb, st.pair);
          }
          j = cb.bin_of(w);
        }
        pjz[j * nzn + zi] += p;
        if (!h_is_x) {
          const std::uint64_t key =
              (h_idx * cb.bins + j) * static_cast<std::uint64_t>(nzn) + zi;
          phjz[key] += p;
        }
      }
    }
    const double h_jz = entropy(pjz);
    double h_xhjz;
    if (h_is_x) {
      // J is a function of the enumerated pair, so H(X^n, J, Z^n) is just
      // the sequence entropy.
      h_xhjz = static_cast<double>(n) * entropy(S.pxz);
    } else {
      std::vector<double> vals;
      vals.reserve(phjz.size());
      for (const auto& [k, v] : phjz) {
        (void)k;
        vals.push_back(v);
      }
      h_xhjz = entropy(vals);
    }
    sum.plugin_equiv = (h_xhjz - h_jz) / static_cast<double>(n);
  }
  return sum;
}

std::vector<ExperimentSummary> run_sweep(const CodingConfig& cfg,
                                         std::span<const std::size_t> ns) {
  std::vector<ExperimentSummary> out;
  out.reserve(ns.size());
  for (std::size_t n : ns) out.push_back(run_experiment(cfg, n));
  return out;
}

nlohmann::json ExperimentSummary::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["M"] = M;
  j["bins"] = bins;
  j["trials"] = trials;
  j["rate_bits"] = jreal(rate_bits);
  j["err_rate"] = jreal(err_rate);
  j["enc_failure_rate"] = jreal(enc_failure_rate);
  j["mean_distortion"] = jreal(mean_distortion);
  j["plugin_equiv"] = jreal(plugin_equiv);
  j["analytic_equiv"] = jreal(analytic_equiv);
  return j;
}

nlohmann::json CodingConfig::to_json() const {
  nlohmann::json j;
  j["source"] = source.to_json();
  if (z_axis) j["z"] = *z_axis;
  nlohmann::json aux_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < aux.n_in(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t o = 0; o < aux.n_out(); ++o) {
      row.push_back(jreal(aux.at(i, o)));
    }
    aux_rows.push_back(std::move(row));
  }
  j["aux"] = std::move(aux_rows);
  j["informed"] = informed;
  j["rate_margin"] = jreal(rate_margin);
  j["typicality_delta"] = jreal(typicality_delta);
  j["seed"] = seed;
  j["trials"] = trials;
  if (!recon.empty()) j["recon"] = recon;
  if (!distortion.empty()) j["distortion"] = distortion;
  return j;
}

CodingConfig CodingConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("source") || !j.contains("aux")) {
    throw DataError("qnb config JSON needs \"source\" and \"aux\"");
  }
  JointPmf source = JointPmf::from_json(j["source"]);

  std::optional<std::size_t> z_axis;
  if (j.contains("z")) {
    if (j["z"].is_number_unsigned()) {
      z_axis = j["z"].get<std::size_t>();
    } else {
      const std::string name = j["z"].get<std::string>();
      const auto& names = source.axis_names();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw DataError("qnb config: unknown z axis '" + name + "'");
      }
      z_axis = static_cast<std::size_t>(it - names.begin());
    }
  }

  const nlohmann::json& aux_j =
      j["aux"].is_object() ? j["aux"]["matrix"] : j["aux"];
  if (!aux_j.is_array() || aux_j.empty() || !aux_j[0].is_array()) {
    throw DataError("qnb config: aux must be a matrix");
  }
  const std::size_t rows = aux_j.size();
  const std::size_t cols = aux_j[0].size();
  std::vector<double> m;
  m.reserve(rows * cols);
  for (const auto& row : aux_j) {
    if (row.size() != cols) throw DataError("qnb config: ragged aux matrix");
    for (const auto& v : row) m.push_back(v.get<double>());
  }
  std::vector<std::string> out_labels;
  if (j["aux"].is_object() && j["aux"].contains("outputs")) {
    for (const auto& v : j["aux"]["outputs"]) {
      out_labels.push_back(v.get<std::string>());
    }
  }

  CodingConfig cfg{std::move(source),
                   z_axis,
                   Channel(rows, cols, std::move(m), {}, std::move(out_labels)),
                   j.value("informed", false),
                   j.value("rate_margin", 0.1),
                   j.value("typicality_delta", 0.1),
                   j.value("seed", std::uint64_t{1}),
                   j.value("trials", std::size_t{1000}),
                   {},
                   {}};
  if (j.contains("recon")) {
    if (j["recon"].is_array() && !j["recon"].empty() &&
        j["recon"][0].is_array()) {
      for (const auto& row : j["recon"]) {
        for (const auto& v : row) {
          cfg.recon.push_back(v.get<std::uint32_t>());
        }
      }
    } else {
      for (const auto& v : j["recon"]) {
        cfg.recon.push_back(v.get<std::uint32_t>());
      }
    }
  }
  if (j.contains("distortion")) {
    for (const auto& row : j["distortion"]) {
      for (const auto& v : row) cfg.distortion.push_back(v.get<double>());
    }
  }
  return cfg;
}

}  // namespace upt::qnb
