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

#ifndef ANOMALY_NN_SERIALIZE_HPP_
#define ANOMALY_NN_SERIALIZE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "anomaly/nn/param.hpp"
#include "json.hpp"

namespace anomaly::nn {

inline constexpr std::string_view kModelFormat = "anomaly-pipeline-model/1";

// {"format", "architecture", "config", "params": [{name, shape, values}]}.
// Doubles are written with round-trip precision, so save/load is exact.
nlohmann::json model_document(std::string_view architecture,
                              const nlohmann::json& config,
                              const std::vector<ParamSlot>& params);

// Checks format and architecture tags, then copies values into `params`,
// matching by name and shape. Throws ValidationError on any mismatch.
void load_params(const nlohmann::json& document, std::string_view architecture,
                 const std::vector<ParamSlot>& params);

// Throws ValidationError unless `document` carries the model format tag and
// the expected architecture tag.
void check_model_tags(const nlohmann::json& document,
                      std::string_view architecture);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_SERIALIZE_HPP_
