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

#ifndef ANOMALY_LOG_HPP_
#define ANOMALY_LOG_HPP_

#include <spdlog/spdlog.h>

#include <utility>

namespace anomaly::log {

// Reads ANOMALY_PIPELINE_LOG (trace|debug|info|warn|error|off, default
// warn) and configures a stderr logger. Safe to call more than once.
void init_from_env();

template <typename Fmt, typename... Args>
void debug(const Fmt& fmt, Args&&... args) {
  spdlog::debug(fmt::runtime(fmt), std::forward<Args>(args)...);
}

template <typename Fmt, typename... Args>
void info(const Fmt& fmt, Args&&... args) {
  spdlog::info(fmt::runtime(fmt), std::forward<Args>(args)...);
}

template <typename Fmt, typename... Args>
void warn(const Fmt& fmt, Args&&... args) {
  spdlog::warn(fmt::runtime(fmt), std::forward<Args>(args)...);
}

}  // namespace anomaly::log

#endif  // ANOMALY_LOG_HPP_
