/*
 * Copyright 2026 The XAL Workbench Authors.
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

#ifndef XAL_ERRORS_H_
#define XAL_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace xal {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data could not be read or does not match its declaration. `row` is
// the 1-based physical line number when the problem is row-specific, else -1.
class DataError : public Error {
 public:
  DataError(const std::string& message, std::int64_t row = -1)
      : Error(row >= 0 ? "row " + std::to_string(row) + ": " + message
                       : message),
        row_(row) {}

  std::int64_t row() const { return row_; }

 private:
  std::int64_t row_;
};

// An operation was invoked in a state that does not allow it (no outstanding
// query, pool exhausted, ...).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace xal

#endif  // XAL_ERRORS_H_
