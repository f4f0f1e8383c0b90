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

#include "anomaly/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomaly/errors.hpp"

namespace anomaly::nn {

std::vector<double> finite_difference_gradient(const ScalarFunction& f,
                                               std::span<const double> params,
                                               double step) {
  if (!(step > 0.0)) throw ValidationError("finite difference step must be > 0");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double saved = p[k];
    p[k] = saved + step;
    const double plus = f(p);
    p[k] = saved - step;
    const double minus = f(p);
    p[k] = saved;
    grad[k] = (plus - minus) / (2.0 * step);
  }
  return grad;
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport check_gradients(const std::vector<ParamSlot>& slots,
                                const std::function<double()>& loss,
                                std::size_t samples, double step, Rng& rng) {
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const ParamSlot& s : slots) {
    offsets.push_back(total);
    total += s.value->size();
  }
  if (total == 0) return {};

  std::vector<std::size_t> picks(total);
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  if (samples < total) {
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(samples);
  }

  GradCheckReport report;
  for (std::size_t flat : picks) {
    const auto slot_it =
        std::upper_bound(offsets.begin(), offsets.end(), flat) - 1;
    const ParamSlot& slot = slots[slot_it - offsets.begin()];
    const std::size_t k = flat - *slot_it;

    double& v = (*slot.value)[k];
    const double saved = v;
    v = saved + step;
    const double plus = loss();
    v = saved - step;
    const double minus = loss();
    v = saved;

    const double numeric = (plus - minus) / (2.0 * step);
    const double err = relative_error((*slot.grad)[k], numeric);
    report.max_relative_error = std::max(report.max_relative_error, err);
    ++report.coordinates;
  }
  return report;
}

}  // namespace anomaly::nn
