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
#include <random>

#include "anomaly/errors.hpp"
#include "anomaly/lstm_ae.hpp"
#include "doctest.h"

using namespace anomaly;
using namespace anomaly::lstm;

namespace {

LatentMatrix random_latents(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  LatentMatrix m(n, std::vector<double>(dim));
  for (auto& row : m)
    for (auto& x : row) x = u(rng);
  return m;
}

// Slow sinusoids in (0.2, 0.8), one phase per dimension.
LatentMatrix smooth_latents(std::size_t n, std::size_t dim) {
  LatentMatrix m(n, std::vector<double>(dim));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < dim; ++k)
      m[t][k] = 0.5 + 0.3 * std::sin(0.3 * static_cast<double>(t) +
                                     static_cast<double>(k));
  return m;
}

LstmAeConfig small_config(std::size_t dim, std::size_t window) {
  LstmAeConfig c;
  c.latent_dim = dim;
  c.window = window;
  c.code_dim = 4;
  c.hidden_size = 8;
  return c;
}

}  // namespace

TEST_CASE("sequence windows") {
  const auto latents = random_latents(10, 3, 1);

  const auto w4 = make_sequences(latents, 4, 1);
  REQUIRE(w4.size() == 10);
  CHECK(w4[0].rows == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK(w4[2].rows == std::vector<std::size_t>{0, 0, 1, 2});
  CHECK(w4[9].rows == std::vector<std::size_t>{6, 7, 8, 9});
  for (std::size_t i = 0; i < w4.size(); ++i) CHECK(w4[i].anchor_index == i);

  const auto w1 = make_sequences(latents, 1, 1);
  REQUIRE(w1.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(w1[i].rows == std::vector<std::size_t>{i});

  const auto s2 = make_sequences(latents, 3, 2);
  REQUIRE(s2.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(s2[i].anchor_index == 2 * i);

  CHECK_THROWS_AS(make_sequences(LatentMatrix{}, 2, 1), ValidationError);
  CHECK_THROWS_AS(make_sequences(latents, 0, 1), ValidationError);
  LatentMatrix ragged = latents;
  ragged[4].pop_back();
  CHECK_THROWS_AS(make_sequences(ragged, 2, 1), ShapeError);
}

TEST_CASE("zero model encodes to zero and decodes to one half") {
  const LstmAeConfig c = small_config(3, 4);
  const LstmAeModel m = LstmAeModel::zeros(c);
  const auto latents = random_latents(6, 3, 2);
  const auto seqs = make_sequences(latents, 4, 1);
  const auto code = m.encode(latents, seqs[5]);
  REQUIRE(code.size() == 4);
  for (double v : code) CHECK(v == 0.0);

  const auto decoded = m.decode(code);
  REQUIRE(decoded.size() == 4);
  for (const auto& step : decoded) {
    REQUIRE(step.size() == 3);
    for (double v : step) CHECK(v == 0.5);
  }

  double window = 0.0;
  for (std::size_t r : seqs[5].rows)
    for (double x : latents[r]) window += (x - 0.5) * (x - 0.5);
  CHECK(m.window_loss(latents, seqs[5]) == doctest::Approx(window / 12.0).epsilon(1e-14));
  CHECK(m.record_error(latents, seqs[5]) == doctest::Approx(window / 12.0).epsilon(1e-14));

  LstmAeConfig anchor = c;
  anchor.error_mode = ErrorMode::kAnchorOnly;
  const LstmAeModel a = LstmAeModel::zeros(anchor);
  double last = 0.0;
  for (double x : latents[5]) last += (x - 0.5) * (x - 0.5);
  CHECK(a.record_error(latents, seqs[5]) == doctest::Approx(last / 3.0).epsilon(1e-14));
}

TEST_CASE("error mode names") {
  CHECK(error_mode_from_string(to_string(ErrorMode::kWindowMean)) == ErrorMode::kWindowMean);
  CHECK(error_mode_from_string(to_string(ErrorMode::kAnchorOnly)) == ErrorMode::kAnchorOnly);
  CHECK_THROWS_AS(error_mode_from_string("median"), ValidationError);
}

TEST_CASE("dimension mismatch is a shape error") {
  const LstmAeModel m = LstmAeModel::build(small_config(3, 2), 1);
  const auto latents = random_latents(4, 5, 1);
  const auto seqs = make_sequences(latents, 2, 1);
  CHECK_THROWS_AS(m.encode(latents, seqs[0]), ShapeError);
}

TEST_CASE("memorizes a constant sequence") {
  const LstmAeConfig c = small_config(3, 4);
  LstmAeModel m = LstmAeModel::build(c, 3);
  const LatentMatrix latents(32, std::vector<double>{0.2, 0.5, 0.8});
  const auto seqs = make_sequences(latents, 4, 1);
  nn::TrainConfig t;
  t.learning_rate = 1e-2;
  t.epochs = 60;
  t.batch_size = 8;
  const auto h = train_lstm_ae(m, latents, seqs, t).loss_history;
  REQUIRE(h.size() == 61);
  CHECK(m.window_loss(latents, seqs[10]) < 1e-2);
}

TEST_CASE("training on smooth sequences reduces the loss") {
  const LstmAeConfig c = small_config(4, 5);
  LstmAeModel m = LstmAeModel::build(c, 4);
  const auto latents = smooth_latents(300, 4);
  const auto seqs = make_sequences(latents, 5, 1);
  nn::TrainConfig t;
  t.learning_rate = 5e-3;
  t.epochs = 20;
  t.batch_size = 16;
  const auto h = train_lstm_ae(m, latents, seqs, t).loss_history;
  CHECK(h.back() < 0.5 * h.front());
  CHECK(m.all_finite());

  // A spike off the training pattern gets the largest anchor error.
  auto doc = m.to_json();
  doc["config"]["error_mode"] = to_string(ErrorMode::kAnchorOnly);
  const LstmAeModel anchor = LstmAeModel::from_json(doc);
  auto probe = smooth_latents(60, 4);
  probe[40] = {0.98, 0.02, 0.98, 0.02};
  const auto errors = record_errors(anchor, probe);
  REQUIRE(errors.size() == 60);
  const auto top = std::max_element(errors.begin(), errors.end()) - errors.begin();
  CHECK(top == 40);
}

TEST_CASE("record errors cover every row for any stride") {
  auto c = small_config(3, 3);
  c.stride = 2;
  const LstmAeModel m = LstmAeModel::build(c, 5);
  const auto latents = random_latents(9, 3, 6);
  const auto errors = record_errors(m, latents);
  REQUIRE(errors.size() == 9);
  const auto seqs = make_sequences(latents, 3, 2);
  // Row 3 takes the score of the window anchored at 4; row 8 anchors its own.
  CHECK(errors[3] == m.record_error(latents, seqs[2]));
  CHECK(errors[4] == m.record_error(latents, seqs[2]));
  CHECK(errors[8] == m.record_error(latents, seqs[4]));
  CHECK(record_errors(m, latents, 3) == errors);
}

TEST_CASE("json round trip") {
  const LstmAeConfig c = small_config(3, 4);
  const LstmAeModel m = LstmAeModel::build(c, 7);
  const LstmAeModel back = LstmAeModel::from_json(m.to_json());
  CHECK(back.config() == c);
  const auto latents = random_latents(8, 3, 9);
  CHECK(record_errors(back, latents) == record_errors(m, latents));
}
