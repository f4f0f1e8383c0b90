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

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "anomaly/errors.hpp"
#include "anomaly/metrics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anomaly;
using namespace anomaly::metrics;

TEST_CASE("scalar metrics for a hand-computed matrix") {
  const ConfusionMatrix cm{50, 10, 5, 100};
  const ScalarMetrics m = scalar_metrics(cm);
  CHECK(std::abs(m.accuracy - 150.0 / 165.0) <= 1e-12);
  CHECK(std::abs(m.precision - 50.0 / 60.0) <= 1e-12);
  CHECK(std::abs(m.recall - 50.0 / 55.0) <= 1e-12);
  CHECK(std::abs(m.f1 - 100.0 / 115.0) <= 1e-12);
  CHECK_FALSE(m.degenerate);
}

TEST_CASE("confusion counts from labels") {
  using L = Label;
  const std::vector<L> pred{L::kAttack, L::kAttack, L::kNormal, L::kNormal, L::kAttack};
  const std::vector<L> truth{L::kAttack, L::kNormal, L::kAttack, L::kNormal, L::kAttack};
  const ConfusionMatrix cm = confusion(pred, truth);
  CHECK(cm == ConfusionMatrix{2, 1, 1, 1});
  CHECK(cm.swapped() == ConfusionMatrix{1, 1, 1, 2});
  CHECK_THROWS_AS(confusion(pred, std::vector<L>{L::kAttack}), ShapeError);

  std::vector<DetectionVerdict> v(2);
  v[0].stage1 = L::kAttack;
  v[0].stage2 = L::kNormal;
  v[0].ground_truth = L::kAttack;
  v[1].ground_truth = L::kNormal;
  CHECK(confusion(v, Stage::kStage1) == ConfusionMatrix{1, 0, 0, 1});
  CHECK(confusion(v, Stage::kStage2) == ConfusionMatrix{0, 0, 1, 1});
  v[1].ground_truth.reset();
  CHECK_THROWS_AS(confusion(v, Stage::kStage1), ValidationError);
}

TEST_CASE("zero denominators report zero and set the flag") {
  const ScalarMetrics none_predicted = scalar_metrics({0, 0, 5, 10});
  CHECK(none_predicted.precision == 0.0);
  CHECK(none_predicted.recall == 0.0);
  CHECK(none_predicted.f1 == 0.0);
  CHECK(none_predicted.degenerate);

  const ScalarMetrics no_positives = scalar_metrics({0, 3, 0, 7});
  CHECK(no_positives.recall == 0.0);
  CHECK(no_positives.degenerate);
  CHECK(no_positives.accuracy == 0.7);

  CHECK_THROWS_AS(scalar_metrics({}), ValidationError);
}

TEST_CASE("macro and micro averages") {
  const ConfusionMatrix attack{50, 10, 5, 100};
  const std::vector<ConfusionMatrix> both{attack, attack.swapped()};
  const AveragedMetrics a = averaged_metrics(both);
  const ScalarMetrics pa = scalar_metrics(attack);
  const ScalarMetrics pn = scalar_metrics(attack.swapped());
  CHECK(a.macro_precision == doctest::Approx((pa.precision + pn.precision) / 2).epsilon(1e-14));
  CHECK(a.macro_recall == doctest::Approx((pa.recall + pn.recall) / 2).epsilon(1e-14));
  CHECK(a.macro_f1 == doctest::Approx((pa.f1 + pn.f1) / 2).epsilon(1e-14));
  // With one-vs-rest over both classes, micro scores equal accuracy.
  CHECK(a.micro_f1 == doctest::Approx(pa.accuracy).epsilon(1e-14));
  CHECK(a.micro_precision == doctest::Approx(pa.accuracy).epsilon(1e-14));
  CHECK(a.micro_recall == doctest::Approx(pa.accuracy).epsilon(1e-14));
  CHECK_THROWS_AS(averaged_metrics({}), ValidationError);
}

TEST_CASE("auc equals the all-pairs statistic") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.4);
  int done = 0;
  while (done < 50) {
    const int n = size(rng);
    std::vector<double> scores(n);
    std::vector<bool> pos(n);
    const bool ties = done % 2 == 0;
    for (int i = 0; i < n; ++i) {
      pos[i] = coin(rng);
      scores[i] = ties ? coarse(rng) : gauss(rng) + (pos[i] ? 0.7 : 0.0);
    }
    const auto np = std::count(pos.begin(), pos.end(), true);
    if (np == 0 || np == n) continue;
    const auto bools = std::make_unique<bool[]>(n);
    for (int i = 0; i < n; ++i) bools[i] = pos[i];
    const RocCurve roc = roc_auc(scores, std::span<const bool>(bools.get(), n));
    CHECK(std::abs(roc.auc - oracle::mann_whitney(scores, pos)) <= 1e-9);
    ++done;
  }
}

TEST_CASE("roc curve shape and invariances") {
  const std::vector<double> s{0.9, 0.8, 0.8, 0.3, 0.1, 0.05};
  const bool p[] = {true, false, true, true, false, false};
  const RocCurve roc = roc_auc(s, p);
  REQUIRE(roc.points.size() == 6);  // (0,0) plus five distinct scores
  CHECK(roc.points.front().fpr == 0.0);
  CHECK(roc.points.front().tpr == 0.0);
  CHECK(std::isinf(roc.points.front().threshold));
  CHECK(roc.points.back().fpr == 1.0);
  CHECK(roc.points.back().tpr == 1.0);
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
    CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
  }

  std::vector<double> squashed;
  std::vector<double> negated;
  for (double x : s) {
    squashed.push_back(std::exp(3.0 * x) + 1.0);
    negated.push_back(-x);
  }
  CHECK(roc_auc(squashed, p).auc == doctest::Approx(roc.auc).epsilon(1e-14));
  CHECK(roc_auc(negated, p).auc == doctest::Approx(1.0 - roc.auc).epsilon(1e-14));

  const bool perfect[] = {true, true, true, false, false, false};
  const std::vector<double> ranked{6, 5, 4, 3, 2, 1};
  CHECK(roc_auc(ranked, perfect).auc == 1.0);

  const bool one_class[] = {true, true};
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, one_class), ValidationError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1}, one_class), ShapeError);
}

TEST_CASE("perfect predictions score one everywhere") {
  const ConfusionMatrix cm{30, 0, 0, 70};
  const ScalarMetrics m = scalar_metrics(cm);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
  const std::vector<ConfusionMatrix> both{cm, cm.swapped()};
  const AveragedMetrics a = averaged_metrics(both);
  CHECK(a.macro_f1 == 1.0);
  CHECK(a.micro_f1 == 1.0);
}
