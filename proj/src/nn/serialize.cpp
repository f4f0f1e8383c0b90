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

#include "anomaly/nn/serialize.hpp"

#include "anomaly/errors.hpp"

namespace anomaly::nn {

using nlohmann::json;

json model_document(std::string_view architecture, const json& config,
                    const std::vector<ParamSlot>& params) {
  json doc;
  doc["format"] = kModelFormat;
  doc["architecture"] = architecture;
  doc["config"] = config;
  json list = json::array();
  for (const ParamSlot& p : params) {
    list.push_back({{"name", p.name},
                    {"shape", p.value->shape()},
                    {"values", p.value->data()}});
  }
  doc["params"] = std::move(list);
  return doc;
}

void check_model_tags(const json& document, std::string_view architecture) {
  if (!document.is_object() || document.value("format", "") != kModelFormat) {
    throw ValidationError("model document lacks format tag '" +
                          std::string(kModelFormat) + "'");
  }
  const std::string arch = document.value("architecture", "");
  if (arch != architecture) {
    throw ValidationError("model architecture '" + arch + "', expected '" +
                          std::string(architecture) + "'");
  }
}

void load_params(const json& document, std::string_view architecture,
                 const std::vector<ParamSlot>& params) {
  check_model_tags(document, architecture);
  const json& list = document.at("params");
  if (!list.is_array() || list.size() != params.size()) {
    throw ValidationError("model document has " +
                          std::to_string(list.size()) + " parameters, expected " +
                          std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& entry = list[i];
    const std::string name = entry.at("name").get<std::string>();
    if (name != params[i].name) {
      throw ValidationError("parameter " + std::to_string(i) + " is '" + name +
                            "', expected '" + params[i].name + "'");
    }
    const Shape shape = entry.at("shape").get<Shape>();
    if (shape != params[i].value->shape()) {
      throw ValidationError("parameter '" + name + "' has shape " +
                            shape_string(shape) + ", expected " +
                            shape_string(params[i].value->shape()));
    }
    auto values = entry.at("values").get<std::vector<double>>();
    *params[i].value = Tensor(shape, std::move(values));
    if (!params[i].value->all_finite()) {
      throw ValidationError("parameter '" + name + "' holds non-finite values");
    }
  }
}

}  // namespace anomaly::nn
