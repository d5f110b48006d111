// Copyright 2026 The Horizon Obstacles Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hobs {

std::string trim(std::string_view text);

// Splits on a single-character delimiter; keeps empty fields.
std::vector<std::string> split(std::string_view text, char delim);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Parses the whole string as a double (also accepts inf/nan); empty on error.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace hobs
