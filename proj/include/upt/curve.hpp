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

#include <vector>

namespace upt {

// One point on a tradeoff boundary: distortion, rate, equivocation, leakage.
// Modules that do not define one of the fields leave it NaN.
struct TradeoffPoint {
  double D;
  double R;
  double E;
  double L;
};

using TradeoffCurve = std::vector<TradeoffPoint>;

}  // namespace upt
