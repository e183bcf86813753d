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

#include <string>

#include <json.hpp>

namespace upt {

// Rounds to 12 significant digits so emitted JSON is stable across runs.
// Infinities are mapped to the strings "inf"/"-inf" (JSON has no infinity).
nlohmann::json jreal(double v);

nlohmann::json load_json(const std::string& path);

// Writes via a temp file in the same directory followed by a rename, so a
// crashed run never leaves a half-written artifact.
void write_file_atomic(const std::string& path, const std::string& content);
void save_json_atomic(const std::string& path, const nlohmann::json& j);

}  // namespace upt
