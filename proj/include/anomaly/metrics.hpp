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

#ifndef ANOMALY_METRICS_HPP_
#define ANOMALY_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "anomaly/verdict.hpp"
#include "json.hpp"

namespace anomaly::metrics {

// Attack is the positive class throughout.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  // Same counts with the normal class treated as positive.
  ConfusionMatrix swapped() const { return {tn, fn, fp, tp}; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

enum class Stage { kStage1, kStage2 };

ConfusionMatrix confusion(std::span<const Label> predicted,
                          std::span<const Label> truth);
// Throws ValidationError if any verdict lacks ground truth.
ConfusionMatrix confusion(std::span<const DetectionVerdict> verdicts,
                          Stage stage);

struct ScalarMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool degenerate = false;
};

ScalarMetrics scalar_metrics(const ConfusionMatrix& cm);

struct AveragedMetrics {
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
};

// Per-class matrices are one-vs-rest; macro averages their scores, micro
// scores the summed counts.
AveragedMetrics averaged_metrics(std::span<const ConfusionMatrix> per_class);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  // Scores >= threshold are called positive; +inf for the (0, 0) point.
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Sweeps the distinct scores in descending order (tied scores move together)
// and integrates with the trapezoid rule. `positive[i]` marks attack records.
RocCurve roc_auc(std::span<const double> scores, std::span<const bool> positive);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const ScalarMetrics& m);
nlohmann::json to_json(const AveragedMetrics& m);

}  // namespace anomaly::metrics

#endif  // ANOMALY_METRICS_HPP_
