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

#ifndef XAL_AL_ENGINE_H_
#define XAL_AL_ENGINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "xal/condition.h"
#include "xal/dataset.h"
#include "xal/explainer.h"
#include "xal/feedback.h"
#include "xal/linear_model.h"

namespace xal {

// -log2 entropy of a Bernoulli(p), with 0 log 0 = 0. Throws InvalidArgument
// outside [0, 1].
double BinaryEntropy(double p);

// Id of the pool instance whose predicted probability has maximal entropy;
// ties go to the smallest id. Throws StateError on an empty pool.
std::int64_t SelectQuery(const LinearModel& model,
                         std::span<const EncodedInstance> pool);

struct LabeledEntry {
  std::int64_t id = 0;
  int label = 0;

  friend bool operator==(const LabeledEntry&, const LabeledEntry&) = default;
};

struct InitialPair {
  LabeledEntry first;
  LabeledEntry second;
  double accuracy = 0.0;  // Test accuracy of the pair trained alone.
};

struct AccuracyWindow {
  double lo = 0.50;
  double hi = 0.55;
};

inline constexpr std::int64_t kDefaultPairAttemptBudget = 100000;

// Rejection sampling of ground-truth-labeled pool pairs whose model reaches
// a test accuracy inside `window` (inclusive). Deterministic given `seed`.
// Throws StateError if the attempt budget runs out first.
std::vector<InitialPair> GenerateInitialPairs(
    const DatasetSplit& split, int count, AccuracyWindow window,
    std::uint64_t seed, const TrainConfig& train = {},
    std::int64_t attempt_budget = kDefaultPairAttemptBudget);

struct CurvePoint {
  int queries_answered = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

// True iff max(accuracy over the last `window` points) minus the accuracy at
// the start of that window is below `epsilon`. Curves shorter than `window`
// are never considered plateaued. Throws InvalidArgument if window < 2.
bool StoppingCheck(std::span<const CurvePoint> curve, int window = 20,
                   double epsilon = 0.005);

// Index of the first curve prefix for which StoppingCheck fires.
std::optional<int> FirstStoppingPoint(std::span<const CurvePoint> curve,
                                      int window = 20, double epsilon = 0.005);

struct AnnotatorResponse {
  int label = 0;
  std::optional<bool> agreement;
  std::optional<int> rating;
  std::vector<std::string> texts;
};

struct QueryRecord {
  std::int64_t instance_id = 0;
  double probability = 0.5;
  std::optional<int> prediction;          // Iff condition != AL.
  std::optional<Explanation> explanation;  // Iff condition == XAL.
  std::optional<AnnotatorResponse> response;
  std::vector<FeedbackRecord> feedback;
  double issued_at = 0.0;
  std::optional<double> responded_at;
};

enum class FeedbackMode {
  kRecordOnly,   // Feedback is logged; training uses labels only.
  kIncorporate,  // Retrains through BuildFeedbackTrainingSet.
};

std::string_view ToString(FeedbackMode m);
// Accepts "record_only" and "incorporate".
FeedbackMode ParseFeedbackMode(std::string_view s);

struct SessionConfig {
  Condition condition = Condition::kAL;
  Stage stage = Stage::kEarly;
  TrainConfig train;
  int queries = 20;  // Queries per session; 0 = unlimited.
  int top_features = kDefaultTopFeatures;
  FeedbackMode feedback_mode = FeedbackMode::kRecordOnly;
  int counterexamples_per_removal = kDefaultCounterexamplesPerRemoval;
  std::uint64_t seed = 0;
};

// Receives each event as the session produces it, before the operation that
// produced it returns the affected state.
using EventSink = std::function<void(const nlohmann::json& event)>;

// One pool-based active-learning session. The session trains only on labels
// submitted to it; ground truth is used solely to evaluate on the test set.
class ALSession {
 public:
  ALSession(std::shared_ptr<const DatasetSplit> split,
            std::shared_ptr<const FeatureSchema> schema,
            std::vector<LabeledEntry> initial, SessionConfig config,
            EventSink sink = nullptr);

  // Rebuilds a session from its event log; replay must reproduce every
  // derived event bit for bit (throws DataError otherwise). Events derived
  // during replay that are missing from the end of `events` go to `sink`.
  static ALSession Replay(std::span<const nlohmann::json> events,
                          std::shared_ptr<const DatasetSplit> split,
                          std::shared_ptr<const FeatureSchema> schema,
                          EventSink sink = nullptr);

  // Selects the next query. Throws StateError if one is outstanding, the
  // session is complete, or the pool is empty.
  const QueryRecord& IssueQuery(double now);

  // Answers the outstanding query: moves the instance to the labeled set,
  // retrains, evaluates, and returns the new curve point.
  const CurvePoint& SubmitResponse(const AnnotatorResponse& response,
                                   std::vector<FeedbackRecord> feedback,
                                   double now);
  const CurvePoint& SubmitLabel(int label, double now = 0.0);

  const SessionConfig& config() const { return config_; }
  Condition condition() const { return config_.condition; }
  Stage stage() const { return config_.stage; }
  const LinearModel& model() const { return model_; }
  const std::vector<LabeledEntry>& labeled() const { return labeled_; }
  std::size_t initial_count() const { return initial_count_; }
  std::size_t pool_size() const { return pool_.size(); }
  const std::vector<CurvePoint>& curve() const { return curve_; }
  const std::vector<QueryRecord>& history() const { return history_; }
  const std::vector<nlohmann::json>& events() const { return events_; }
  int answered() const { return static_cast<int>(labeled_.size() - initial_count_); }
  bool complete() const;
  const QueryRecord* outstanding() const;

  // Pool instance ids in ascending order.
  std::vector<std::int64_t> PoolIds() const;
  // Features of a pool or labeled instance; never its label.
  const Eigen::VectorXd& Features(std::int64_t id) const;

  // Labeled set as training rows carrying the submitted labels.
  std::vector<TrainingExample> TrainingSet() const;
  // All feedback records accumulated over the history.
  std::vector<FeedbackRecord> AllFeedback() const;

  const DatasetSplit& split() const { return *split_; }
  const FeatureSchema& schema() const { return *schema_; }

 private:
  void Retrain();
  void Emit(nlohmann::json event);
  std::size_t PoolIndexOf(std::int64_t id) const;

  std::shared_ptr<const DatasetSplit> split_;
  std::shared_ptr<const FeatureSchema> schema_;
  SessionConfig config_;
  EventSink sink_;
  std::vector<LabeledEntry> labeled_;
  std::size_t initial_count_ = 0;
  std::vector<std::size_t> pool_;  // Indices into split_->pool, ascending id.
  LinearModel model_;
  std::vector<CurvePoint> curve_;
  std::vector<QueryRecord> history_;
  std::vector<nlohmann::json> events_;
};

// Runs `n` select/label/retrain steps answered with ground truth, starting
// from `pair`. The returned session holds the trace; its model is the
// late-stage snapshot.
ALSession SimulateOracleRun(std::shared_ptr<const DatasetSplit> split,
                            std::shared_ptr<const FeatureSchema> schema,
                            const InitialPair& pair, int n,
                            const TrainConfig& train = {});

inline constexpr int kLateStageQueries = 200;

struct LateStageSnapshot {
  LinearModel model;
  std::vector<LabeledEntry> labeled;
  std::vector<CurvePoint> curve;
};

// Throws StateError if the pool does not exceed n.
LateStageSnapshot SimulateToLateStage(std::shared_ptr<const DatasetSplit> split,
                                      std::shared_ptr<const FeatureSchema> schema,
                                      const InitialPair& pair,
                                      int n = kLateStageQueries,
                                      const TrainConfig& train = {});

// Ground truth of a pool instance, for simulators.
int PoolGroundTruth(const DatasetSplit& split, std::int64_t id);

nlohmann::json CurvePointToJson(const CurvePoint& p);
nlohmann::json QueryRecordToJson(const QueryRecord& q);

}  // namespace xal

#endif  // XAL_AL_ENGINE_H_
