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

#include "anomaly/verdict.hpp"

#include <sstream>
#include <string>

#include "anomaly/errors.hpp"
#include "anomaly/io.hpp"

namespace anomaly {

namespace {

constexpr const char* kHeader =
    "record_index,epsilon,stage1,stage2,iforest_score,ground_truth";

std::size_t parse_index(const std::string& cell, std::size_t row) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != cell.size()) {
    throw DataError("bad record_index '" + cell + "'", row);
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

void save_verdicts_csv(const std::filesystem::path& path,
                       std::span<const DetectionVerdict> verdicts) {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& v : verdicts) {
    out << v.record_index << ',' << io::format_double(v.reconstruction_error)
        << ',' << ingest::to_string(v.stage1) << ','
        << ingest::to_string(v.stage2) << ',';
    if (v.iforest_score) out << io::format_double(*v.iforest_score);
    out << ',';
    if (v.ground_truth) out << ingest::to_string(*v.ground_truth);
    out << '\n';
  }
  io::write_file_atomic(path, out.str());
}

std::vector<DetectionVerdict> load_verdicts_csv(
    const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ValidationError(path.string() + ": unexpected verdict header");
  }
  std::vector<DetectionVerdict> verdicts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = io::split_csv_line(line);
    if (cells.size() != 6) {
      throw DataError("expected 6 cells, found " + std::to_string(cells.size()),
                      row);
    }
    try {
      DetectionVerdict v;
      v.record_index = parse_index(cells[0], row);
      v.reconstruction_error = io::parse_double(cells[1]);
      v.stage1 = ingest::label_from_string(cells[2]);
      v.stage2 = ingest::label_from_string(cells[3]);
      if (!cells[4].empty()) v.iforest_score = io::parse_double(cells[4]);
      if (!cells[5].empty()) v.ground_truth = ingest::label_from_string(cells[5]);
      verdicts.push_back(v);
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError(e.what(), row);
    }
  }
  return verdicts;
}

}  // namespace anomaly
