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

#ifndef ANOMALY_ERRORS_HPP_
#define ANOMALY_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anomaly {

// Bad input, bad config, or a violated precondition. Raised before any side
// effect wherever possible.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tensor or vector extents that do not agree with what an operation expects.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A malformed data file. `row` is 1-based over data rows (header excluded),
// 0 when the problem is not tied to one row.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& message, std::size_t row = 0)
      : std::runtime_error(message), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Training produced a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& message, std::size_t epoch,
                  std::size_t batch)
      : std::runtime_error(message), epoch_(epoch), batch_(batch) {}
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

// Persisted artifacts were produced under a different config.
class HashMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wraps a failure from one pipeline stage with the stage name prefixed.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace anomaly

#endif  // ANOMALY_ERRORS_HPP_
