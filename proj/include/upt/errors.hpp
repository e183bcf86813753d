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

#include <stdexcept>
#include <string>

namespace upt {

// Base class of all upt errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Misuse of an API: overlapping axis sets, mismatched lengths, bad flags.
// Maps to CLI exit code 2.
struct ArgumentError : Error {
  using Error::Error;
};

// A numeric input outside its admissible interval. Carries the interval so
// callers can report it. Maps to CLI exit code 3.
struct DomainError : Error {
  DomainError(const std::string& what, double lo_bound, double hi_bound)
      : Error(what), lo(lo_bound), hi(hi_bound) {}
  double lo;
  double hi;
};

// Malformed or inconsistent data: invalid pmfs, bad files, unknown symbols.
// Maps to CLI exit code 4.
struct DataError : Error {
  using Error::Error;
};

// A size guard was hit (codebook caps, enumeration caps). Maps to CLI exit
// code 5.
struct CapError : Error {
  using Error::Error;
};

}  // namespace upt
