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

#ifndef XAL_DIGEST_H_
#define XAL_DIGEST_H_

#include <string>
#include <string_view>

namespace xal {

// Hex SHA-1 of "blob <size>\0<content>", i.e. the git object id.
std::string GitBlobHash(std::string_view content);
// Same, over a file's bytes. Throws DataError if unreadable.
std::string GitBlobHashOfFile(const std::string& path);

}  // namespace xal

#endif  // XAL_DIGEST_H_
