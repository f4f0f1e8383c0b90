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

#include "doctest.h"
#include "gradient_cases.hpp"

TEST_CASE("analytic gradients match central differences") {
  for (std::uint64_t seed : {1u, 2u}) {
    for (const auto& c : gradcases::all_cases(seed * 1000)) {
      CAPTURE(c.name);
      CAPTURE(seed);
      CHECK(c.report.coordinates >= 100);
      CHECK(c.report.max_relative_error <= c.tolerance);
    }
  }
}

TEST_CASE("relative error uses the floor for vanishing gradients") {
  CHECK(anomaly::nn::relative_error(0.0, 0.0) == 0.0);
  CHECK(anomaly::nn::relative_error(1e-9, 0.0) == doctest::Approx(1e-3));
  CHECK(anomaly::nn::relative_error(2.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("finite difference of a quadratic") {
  const std::vector<double> p = {1.0, -2.0, 0.5};
  const auto g = anomaly::nn::finite_difference_gradient(
      [](std::span<const double> v) {
        return v[0] * v[0] + 3.0 * v[1] + v[2] * v[1];
      },
      p, 1e-5);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(3.5));
  CHECK(g[2] == doctest::Approx(-2.0));
}
