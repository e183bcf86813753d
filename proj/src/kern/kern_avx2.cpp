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

// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must check avx2_supported() before routing here.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <span>

namespace upt::kern::avx2 {

namespace {

// log2 on 4 lanes. Inputs must be strictly positive normal doubles.
//
// Decomposes x = 2^e * m with m in [sqrt(2)/2, sqrt(2)), then evaluates
// log2(m) = 2*log2(e) * atanh(t) with t = (m-1)/(m+1) as a 12-term odd
// polynomial in t. Max |t| is 0.1716, so the truncation error is below
// 1e-18 relative; overall accuracy is within ~2 ulp of std::log2.
inline __m256d v_log2(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);

  // Exponent as double via the 2^52 + 2^51 magic-number conversion.
  __m256i e_int = _mm256_srli_epi64(bits, 52);
  e_int = _mm256_sub_epi64(e_int, _mm256_set1_epi64x(1023));
  const __m256i magic = _mm256_set1_epi64x(0x4338000000000000LL);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_add_epi64(e_int, magic)),
      _mm256_set1_pd(6755399441055744.0));  // 2^52 + 2^51

  // Mantissa in [1, 2).
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Fold [sqrt(2), 2) down to [sqrt(2)/2, 1) and bump the exponent.
  const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
  const __m256d gt = _mm256_cmp_pd(m, sqrt2, _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), gt);
  e = _mm256_add_pd(e, _mm256_and_pd(gt, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d t =
      _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d t2 = _mm256_mul_pd(t, t);

  // 2*log2(e) / (2k+1), k = 11..0.
  const double k2log2e = 2.8853900817779268;
  __m256d p = _mm256_set1_pd(k2log2e / 23.0);
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 21.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 19.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 17.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 15.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 13.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 11.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 9.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 7.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 5.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e / 3.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(k2log2e));

  return _mm256_fmadd_pd(t, p, e);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  const double* p = x.data();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(p + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += p[i];
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double* px = x.data();
  const double* py = y.data();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i + 4),
                         _mm256_loadu_pd(py + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), a0);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += px[i] * py[i];
  return acc;
}

double plogp_sum(std::span<const double> x, double zero_eps) {
  const std::size_t n = x.size();
  const double* p = x.data();
  const __m256d eps = _mm256_set1_pd(zero_eps);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(p + i);
    const __m256d keep = _mm256_cmp_pd(v, eps, _CMP_GT_OQ);
    // Masked lanes are replaced by 1.0: 1*log2(1) contributes exactly 0.
    const __m256d safe = _mm256_blendv_pd(one, v, keep);
    acc = _mm256_fmadd_pd(safe, v_log2(safe), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    if (p[i] > zero_eps) tail += p[i] * std::log2(p[i]);
  }
  return hsum(acc) + tail;
}

double xlogr_sum(std::span<const double> x, std::span<const double> y,
                 double zero_eps, double y_floor) {
  const std::size_t n = x.size();
  const double* px = x.data();
  const double* py = y.data();
  const __m256d eps = _mm256_set1_pd(zero_eps);
  const __m256d floor = _mm256_set1_pd(y_floor);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(px + i);
    const __m256d keep = _mm256_cmp_pd(xv, eps, _CMP_GT_OQ);
    const __m256d xs = _mm256_blendv_pd(one, xv, keep);
    const __m256d ys = _mm256_blendv_pd(
        one, _mm256_max_pd(_mm256_loadu_pd(py + i), floor), keep);
    const __m256d r = _mm256_div_pd(xs, ys);
    acc = _mm256_fmadd_pd(xs, v_log2(r), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double xv = px[i];
    if (xv <= zero_eps) continue;
    const double yv = py[i] < y_floor ? y_floor : py[i];
    tail += xv * std::log2(xv / yv);
  }
  return hsum(acc) + tail;
}

void log2_map(std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  const double* p = in.data();
  double* q = out.data();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(q + i, v_log2(_mm256_loadu_pd(p + i)));
  }
  for (; i < n; ++i) q[i] = std::log2(p[i]);
}

}  // namespace upt::kern::avx2

#endif  // __x86_64__
