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

#include "upt/kern.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace upt::kern {

namespace scalar {
double sum(std::span<const double>);
double dot(std::span<const double>, std::span<const double>);
double plogp_sum(std::span<const double>, double);
double xlogr_sum(std::span<const double>, std::span<const double>, double,
                 double);
void log2_map(std::span<const double>, std::span<double>);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define UPT_HAVE_AVX2_TU 1
namespace avx2 {
double sum(std::span<const double>);
double dot(std::span<const double>, std::span<const double>);
double plogp_sum(std::span<const double>, double);
double xlogr_sum(std::span<const double>, std::span<const double>, double,
                 double);
void log2_map(std::span<const double>, std::span<double>);
}  // namespace avx2
#endif

namespace {

struct Table {
  Backend backend;
  double (*sum)(std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*plogp_sum)(std::span<const double>, double);
  double (*xlogr_sum)(std::span<const double>, std::span<const double>, double,
                      double);
  void (*log2_map)(std::span<const double>, std::span<double>);
};

constexpr Table kScalarTable{Backend::scalar, scalar::sum,       scalar::dot,
                             scalar::plogp_sum, scalar::xlogr_sum,
                             scalar::log2_map};

#ifdef UPT_HAVE_AVX2_TU
constexpr Table kAvx2Table{Backend::avx2,    avx2::sum,       avx2::dot,
                           avx2::plogp_sum,  avx2::xlogr_sum, avx2::log2_map};
#endif

Table pick_initial() {
  const char* env = std::getenv("UPT_KERNEL");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return kScalarTable;
#ifdef UPT_HAVE_AVX2_TU
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return kAvx2Table;
#endif
  }
#ifdef UPT_HAVE_AVX2_TU
  if (avx2_supported()) return kAvx2Table;
#endif
  return kScalarTable;
}

Table& table() {
  static Table t = pick_initial();
  return t;
}

}  // namespace

bool avx2_supported() {
#ifdef UPT_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return table().backend; }

const char* backend_name() {
  return table().backend == Backend::avx2 ? "avx2" : "scalar";
}

void set_backend(Backend b) {
  if (b == Backend::scalar) {
    table() = kScalarTable;
    return;
  }
#ifdef UPT_HAVE_AVX2_TU
  if (avx2_supported()) {
    table() = kAvx2Table;
    return;
  }
#endif
  throw std::runtime_error("kern: avx2 backend not supported on this CPU");
}

double sum(std::span<const double> x) { return table().sum(x); }

double dot(std::span<const double> x, std::span<const double> y) {
  return table().dot(x, y);
}

double plogp_sum(std::span<const double> x, double zero_eps) {
  return table().plogp_sum(x, zero_eps);
}

double xlogr_sum(std::span<const double> x, std::span<const double> y,
                 double zero_eps, double y_floor) {
  return table().xlogr_sum(x, y, zero_eps, y_floor);
}

void log2_map(std::span<const double> in, std::span<double> out) {
  table().log2_map(in, out);
}

}  // namespace upt::kern
