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

#ifndef XAL_CONDITION_H_
#define XAL_CONDITION_H_

#include <string>
#include <string_view>

namespace xal {

// What the annotator sees with each query: AL shows the profile only, CL adds
// the model prediction, XAL adds the prediction and its explanation.
enum class Condition { kAL, kCL, kXAL };

enum class Stage { kEarly, kLate };

inline bool ShowsPrediction(Condition c) { return c != Condition::kAL; }
inline bool ShowsExplanation(Condition c) { return c == Condition::kXAL; }

std::string_view ToString(Condition c);
std::string_view ToString(Stage s);
// Case-insensitive; throws InvalidArgument on anything else.
Condition ParseCondition(std::string_view s);
Stage ParseStage(std::string_view s);

}  // namespace xal

#endif  // XAL_CONDITION_H_
