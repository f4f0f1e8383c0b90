/*
 * Copyright 2026 The anomaly-pipeline Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANOMALY_IO_HPP_
#define ANOMALY_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace anomaly::io {

// Writes to a sibling temp file and renames it over `path`, so readers never
// observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);
void write_json_atomic(const std::filesystem::path& path,
                       const nlohmann::json& doc);

std::string read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace anomaly::io

#endif  // ANOMALY_IO_HPP_
