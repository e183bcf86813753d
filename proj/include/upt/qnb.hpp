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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "upt/channel.hpp"
#include "upt/pmf.hpp"

// Desk-scale random-codebook quantize-and-bin coding simulator. A codebook
// of M auxiliary sequences is drawn i.i.d. from p(u); the encoder sends only
// the bin index of the first codeword jointly typical with the source
// sequence, and the decoder disambiguates within the bin using its side
// information. Everything is seeded and deterministic; trials run in
// parallel with per-trial derived seeds. This is a demonstrator for the
// coding arguments, not a capacity-achieving codec: codebook and
// enumeration sizes are hard-capped at 2^20.
namespace upt::qnb {

inline constexpr std::size_t kSizeCap = 1u << 20;

struct CodingConfig {
  // Joint law of the encoded attributes and (optionally) the user side
  // information. The private/public axis sets mark X_h and X_r among the
  // non-z axes; `z_axis` names the side-information axis, if any.
  JointPmf source;
  std::optional<std::size_t> z_axis;
  // p(u | x): rows indexed by the non-z composite (statistically informed)
  // or by the (x, z) pair composite (informed encoder).
  Channel aux;
  bool informed = false;
  double rate_margin = 0.1;       // epsilon in the codebook exponents
  double typicality_delta = 0.1;  // L-inf tolerance on letter frequencies
  std::uint64_t seed = 1;
  std::size_t trials = 1000;
  // Reconstruction lookup xhat = f(u, z), |U| x |Z| row-major indices into
  // the public composite alphabet; empty means xhat = u (requires the aux
  // output alphabet to match the public composite).
  std::vector<std::uint32_t> recon;
  // rho(x_r, xhat), |X_r| x |Xhat| row-major; empty means Hamming.
  std::vector<double> distortion;

  nlohmann::json to_json() const;
  static CodingConfig from_json(const nlohmann::json& j);
};

struct Codebook {
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t bins = 0;
  std::vector<std::uint32_t> symbols;  // M x n

  std::span<const std::uint32_t> word(std::size_t w) const {
    return {symbols.data() + w * n, n};
  }
  // Balanced consecutive-range binning: bin sizes differ by at most one.
  std::size_t bin_of(std::size_t w) const { return w * bins / M; }
};

// Derived codebook size M = ceil(2^{n(I(enc;U)+eps)}) and bin count
// ceil(2^{n(I(enc;U|Z)+eps)}); throws CapError when either exceeds 2^20.
Codebook build_codebook(const CodingConfig& cfg, std::size_t n);

struct EncodeOutcome {
  bool ok = false;  // false: no jointly typical codeword (explicit outcome)
  std::size_t w = 0;
  std::size_t bin = 0;
};

// First codeword (lowest index) jointly typical with the source sequence
// (letter-frequency typicality within typicality_delta); the informed
// encoder checks the (x, z, u) triple. z_seq is ignored unless informed.
EncodeOutcome encode(const CodingConfig& cfg,
                     std::span<const std::uint32_t> x_seq,
                     std::span<const std::uint32_t> z_seq,
                     const Codebook& cb);

// The unique jointly typical codeword of the bin against z_seq; with zero
// or several candidates, the maximum-joint-likelihood member (among the
// candidates if any, else the whole bin), ties to the lowest index.
std::size_t decode(const CodingConfig& cfg, std::size_t bin,
                   std::span<const std::uint32_t> z_seq, const Codebook& cb);

struct TrialOutcome {
  bool decoded_ok = false;
  bool encode_failed = false;
  double distortion = 0.0;
  std::size_t bin_index = 0;
  std::size_t codeword_index = 0;
};

struct ExperimentSummary {
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t bins = 0;
  std::size_t trials = 0;
  double rate_bits = 0.0;         // log2(bins)/n
  double err_rate = 0.0;          // fraction of trials with W-hat != W
  double enc_failure_rate = 0.0;  // no typical codeword (fallback used)
  double mean_distortion = 0.0;
  // (1/n) H(X_h^n | J, Z^n) by exact enumeration; NaN when the enumeration
  // space exceeds the cap.
  double plugin_equiv = 0.0;
  double analytic_equiv = 0.0;  // H(X_h | U, Z)
  std::vector<TrialOutcome> outcomes;

  nlohmann::json to_json() const;
};

// Runs `cfg.trials` seeded trials at blocklength n: encode, transmit the
// bin index, decode with side information, reconstruct, and account
// distortion and equivocation. On encoding failure the encoder falls back
// to the maximum-likelihood codeword (deterministic), and the trial counts
// as an error if the decoder then misses.
ExperimentSummary run_experiment(const CodingConfig& cfg, std::size_t n);

std::vector<ExperimentSummary> run_sweep(const CodingConfig& cfg,
                                         std::span<const std::size_t> ns);

}  // namespace upt::qnb
