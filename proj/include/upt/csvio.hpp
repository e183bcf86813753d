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

#include <iosfwd>
#include <string>
#include <vector>

namespace upt::csv {

// Parses CSV with RFC 4180 quoting. Returns one vector of fields per record;
// empty lines are skipped. Throws DataError on unbalanced quotes.
std::vector<std::vector<std::string>> parse(std::istream& in);
std::vector<std::vector<std::string>> parse_file(const std::string& path);

// Quotes a field if it contains a comma, quote, or newline.
std::string quote(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Formats a double with 12 significant digits (the float format used in all
// emitted files).
std::string fmt12(double v);

}  // namespace upt::csv
