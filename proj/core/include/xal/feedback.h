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

#ifndef XAL_FEEDBACK_H_
#define XAL_FEEDBACK_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "xal/dataset.h"
#include "xal/linear_model.h"

namespace xal {

class ALSession;

enum class FeedbackKind {
  kLabel,
  kAgreement,
  kExplanationRating,
  kFeatureAdjustment,
  kFeatureRank,
  kRelationNote,
};

enum class AdjustmentAction { kIncrease, kDecrease, kRemove, kFlipSign };

struct LabelFeedback {
  int label = 0;
};
struct AgreementFeedback {
  bool agrees = false;
};
struct ExplanationRating {
  int rating = 3;  // 1..5
};
struct FeatureAdjustment {
  std::string feature;
  AdjustmentAction action = AdjustmentAction::kRemove;
};
// `above` should weigh more than `below`.
struct FeatureRank {
  std::string above;
  std::string below;
};
struct RelationNote {
  std::string text;
};

using FeedbackPayload =
    std::variant<LabelFeedback, AgreementFeedback, ExplanationRating,
                 FeatureAdjustment, FeatureRank, RelationNote>;

struct FeedbackRecord {
  std::int64_t instance_id = 0;
  double timestamp = 0.0;
  FeedbackPayload payload;

  FeedbackKind kind() const { return static_cast<FeedbackKind>(payload.index()); }
};

std::string_view ToString(FeedbackKind kind);
std::string_view ToString(AdjustmentAction action);
AdjustmentAction ParseAdjustmentAction(std::string_view s);

// Throws InvalidArgument if a rating is outside 1..5, a label is not binary,
// or a named feature is absent from `schema`.
void ValidateFeedback(const FeedbackRecord& record, const FeatureSchema& schema);

nlohmann::json FeedbackToJson(const FeedbackRecord& record);
FeedbackRecord FeedbackFromJson(const nlohmann::json& j);

// Sample weight for a label given with an explanation rating. A rejecting
// label (agreement == false) is softened by a high rating of the rejected
// rationale: 1 - (rating - 1) / 8, in [0.5, 1]. Accepting labels weigh 1.
double RatingToWeight(int rating, bool agreement);

// m copies of `source` whose `feature` is resampled from the pool marginal
// (the source value excluded), every other dimension bit-identical, each
// labeled `label`. Throws InvalidArgument if the pool holds fewer than two
// distinct values of the feature.
std::vector<EncodedInstance> Counterexamples(
    const EncodedInstance& source, int label, std::string_view feature, int m,
    std::span<const EncodedInstance> pool, const FeatureSchema& schema,
    std::uint64_t seed);

inline constexpr int kDefaultCounterexamplesPerRemoval = 20;

// Training set after feedback incorporation: `labeled` with rating-derived
// weights, plus counterexamples for each `remove` adjustment. Other
// adjustment kinds are recorded by callers but do not change training.
// Counterexamples carry ids -1, -2, ... in generation order.
// Throws InvalidArgument if a record names an instance not in `labeled`.
std::vector<TrainingExample> BuildFeedbackTrainingSet(
    std::span<const TrainingExample> labeled,
    std::span<const FeedbackRecord> records,
    std::span<const EncodedInstance> pool, const FeatureSchema& schema,
    int counterexamples_per_removal, std::uint64_t seed);

// Retrains the session's labeled set with `records` incorporated. Empty
// `records` reproduces the session's plain retrain exactly.
LinearModel ApplyFeedback(const ALSession& session,
                          std::span<const FeedbackRecord> records,
                          int counterexamples_per_removal =
                              kDefaultCounterexamplesPerRemoval);

// Records whose kind is consumed by BuildFeedbackTrainingSet.
bool IsTrainingConsumed(const FeedbackRecord& record);

// Frequency of each feedback kind (and adjustment action) across records.
std::map<std::string, std::int64_t> SummarizeFeedback(
    std::span<const FeedbackRecord> records);

}  // namespace xal

#endif  // XAL_FEEDBACK_H_
