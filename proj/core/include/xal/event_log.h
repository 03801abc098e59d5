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

#ifndef XAL_EVENT_LOG_H_
#define XAL_EVENT_LOG_H_

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace xal {

// Append-only newline-delimited JSON file. Every Append is flushed and
// fsync'ed before it returns.
class EventLogWriter {
 public:
  explicit EventLogWriter(const std::string& path);
  ~EventLogWriter();
  EventLogWriter(const EventLogWriter&) = delete;
  EventLogWriter& operator=(const EventLogWriter&) = delete;
  EventLogWriter(EventLogWriter&& other) noexcept;
  EventLogWriter& operator=(EventLogWriter&& other) noexcept;

  void Append(const nlohmann::json& event);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
};

// Reads every complete line. A torn final line (no trailing newline, as left
// by a crash mid-write) is ignored; any other malformed line is a DataError.
std::vector<nlohmann::json> ReadEventLog(const std::string& path);

// Cuts a torn final line off the file so later appends start on a fresh
// line. Returns the number of bytes removed.
std::size_t TruncateTornTail(const std::string& path);

}  // namespace xal

#endif  // XAL_EVENT_LOG_H_
