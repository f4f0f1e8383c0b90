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

#ifndef ANOMALY_VERDICT_HPP_
#define ANOMALY_VERDICT_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "anomaly/ingest.hpp"

namespace anomaly {

using ingest::Label;

struct DetectionVerdict {
  std::size_t record_index = 0;
  double reconstruction_error = 0.0;
  Label stage1 = Label::kNormal;
  Label stage2 = Label::kNormal;
  // Score from the forest that examined the record's stage-1 partition;
  // empty when that partition was too small to fit a forest.
  std::optional<double> iforest_score;
  std::optional<Label> ground_truth;

  friend bool operator==(const DetectionVerdict&,
                         const DetectionVerdict&) = default;
};

// Header: record_index,epsilon,stage1,stage2,iforest_score,ground_truth.
// Empty cells for absent optionals; doubles with round-trip precision.
void save_verdicts_csv(const std::filesystem::path& path,
                       std::span<const DetectionVerdict> verdicts);
std::vector<DetectionVerdict> load_verdicts_csv(
    const std::filesystem::path& path);

}  // namespace anomaly

#endif  // ANOMALY_VERDICT_HPP_
