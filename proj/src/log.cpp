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

#include "anomaly/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <string>

namespace anomaly::log {

void init_from_env() {
  auto logger = spdlog::get("anomaly");
  if (!logger) {
    logger = spdlog::stderr_color_mt("anomaly");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("ANOMALY_PIPELINE_LOG");
  const std::string level = env != nullptr ? env : "warn";
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace anomaly::log
