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

#include "anomaly/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "anomaly/errors.hpp"

namespace anomaly::metrics {

using nlohmann::json;

namespace {

// Ratio with the zero-denominator convention.
double ratio(double num, double den, bool& degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

}  // namespace

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionMatrix confusion(std::span<const Label> predicted,
                          std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    throw ShapeError("confusion: prediction and truth lengths differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool pred = predicted[i] == Label::kAttack;
    const bool real = truth[i] == Label::kAttack;
    if (pred && real) ++cm.tp;
    if (pred && !real) ++cm.fp;
    if (!pred && real) ++cm.fn;
    if (!pred && !real) ++cm.tn;
  }
  return cm;
}

ConfusionMatrix confusion(std::span<const DetectionVerdict> verdicts,
                          Stage stage) {
  std::vector<Label> predicted;
  std::vector<Label> truth;
  predicted.reserve(verdicts.size());
  truth.reserve(verdicts.size());
  for (const auto& v : verdicts) {
    if (!v.ground_truth) {
      throw ValidationError("confusion: record " +
                            std::to_string(v.record_index) +
                            " has no ground truth");
    }
    predicted.push_back(stage == Stage::kStage1 ? v.stage1 : v.stage2);
    truth.push_back(*v.ground_truth);
  }
  return confusion(predicted, truth);
}

ScalarMetrics scalar_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("scalar_metrics: empty matrix");
  ScalarMetrics m;
  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  m.accuracy = (tp + tn) / (tp + tn + fp + fn);
  m.precision = ratio(tp, tp + fp, m.degenerate);
  m.recall = ratio(tp, tp + fn, m.degenerate);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall,
               m.degenerate);
  return m;
}

AveragedMetrics averaged_metrics(std::span<const ConfusionMatrix> per_class) {
  if (per_class.empty()) throw ValidationError("averaged_metrics: no classes");
  AveragedMetrics a;
  ConfusionMatrix pooled;
  for (const auto& cm : per_class) {
    bool degenerate = false;
    const double tp = static_cast<double>(cm.tp);
    const double p = ratio(tp, tp + static_cast<double>(cm.fp), degenerate);
    const double r = ratio(tp, tp + static_cast<double>(cm.fn), degenerate);
    a.macro_precision += p;
    a.macro_recall += r;
    a.macro_f1 += ratio(2.0 * p * r, p + r, degenerate);
    pooled += cm;
  }
  const double n = static_cast<double>(per_class.size());
  a.macro_precision /= n;
  a.macro_recall /= n;
  a.macro_f1 /= n;

  bool degenerate = false;
  const double tp = static_cast<double>(pooled.tp);
  a.micro_precision = ratio(tp, tp + static_cast<double>(pooled.fp), degenerate);
  a.micro_recall = ratio(tp, tp + static_cast<double>(pooled.fn), degenerate);
  a.micro_f1 = ratio(2.0 * a.micro_precision * a.micro_recall,
                     a.micro_precision + a.micro_recall, degenerate);
  return a;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) {
    throw ShapeError("roc_auc: scores and labels differ in length");
  }
  const auto pos = static_cast<std::size_t>(
      std::count(positive.begin(), positive.end(), true));
  const std::size_t neg = positive.size() - pos;
  if (pos == 0 || neg == 0) {
    throw ValidationError("roc_auc: both classes must be present");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      positive[order[k]] ? ++tp : ++fp;
      ++k;
    }
    const RocPoint next{static_cast<double>(fp) / static_cast<double>(neg),
                        static_cast<double>(tp) / static_cast<double>(pos),
                        threshold};
    const RocPoint& last = curve.points.back();
    area += (next.fpr - last.fpr) * (next.tpr + last.tpr) / 2.0;
    curve.points.push_back(next);
  }
  curve.auc = area;
  return curve;
}

json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

json to_json(const ScalarMetrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"degenerate", m.degenerate}};
}

json to_json(const AveragedMetrics& m) {
  return {{"macro", {{"precision", m.macro_precision},
                     {"recall", m.macro_recall},
                     {"f1", m.macro_f1}}},
          {"micro", {{"precision", m.micro_precision},
                     {"recall", m.micro_recall},
                     {"f1", m.micro_f1}}}};
}

}  // namespace anomaly::metrics
