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

#ifndef XAL_HARNESS_H_
#define XAL_HARNESS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xal/al_engine.h"
#include "xal/annotators.h"
#include "xal/condition.h"
#include "xal/dataset.h"

namespace xal {

// A loaded, encoded and split dataset shared read-only by every run.
struct Corpus {
  std::string path;
  std::string content_hash;  // git blob id of the file
  DatasetDecl decl;
  LoadedData data;
  std::shared_ptr<const FeatureSchema> schema;
  std::shared_ptr<const DatasetSplit> split;

  static Corpus Load(const std::string& path, const DatasetDecl& decl,
                     std::uint64_t split_seed,
                     double test_fraction = kDefaultTestFraction);
};

struct ExperimentConfig {
  std::string dataset_path;
  std::vector<std::string> features;  // Empty: default teaching feature set.
  std::uint64_t split_seed = 0;
  double test_fraction = kDefaultTestFraction;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<Condition> conditions = {Condition::kAL, Condition::kCL,
                                       Condition::kXAL};
  std::vector<AnnotatorProfile> profiles = {AnnotatorProfile::Oracle()};
  std::vector<Stage> stages = {Stage::kEarly, Stage::kLate};
  int queries = 20;
  int late_stage_queries = kLateStageQueries;
  int curve_queries = kLateStageQueries;
  double lambda = 1.0;
  AccuracyWindow window;
  int stopping_window = 20;
  double stopping_epsilon = 0.005;
  FeedbackMode feedback_mode = FeedbackMode::kRecordOnly;
  // Anchored-profile grid swept by CompareConditions.
  std::vector<double> compare_knowledge = {0.55, 0.65, 0.75};
  std::vector<double> compare_anchor = {0.0, 0.25, 0.5, 0.75, 1.0};
  double compare_rating_gap = 0.0;
  std::string output_dir;
  int threads = 0;  // 0: hardware concurrency.

  // Throws InvalidArgument on an empty seed list, an empty or duplicated
  // condition set, or an invalid profile.
  void Validate() const;
  DatasetDecl Decl() const;
  TrainConfig Train() const;

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults.
  static ExperimentConfig FromJson(const nlohmann::json& j);
};

struct LearningCurveResult {
  std::vector<std::uint64_t> seeds;
  std::vector<InitialPair> pairs;
  std::vector<std::vector<CurvePoint>> per_seed;
  std::vector<CurvePoint> mean;
  std::vector<double> accuracy_stderr;
  std::optional<int> stopping_query;  // First plateau of the mean curve.
};

// Per seed: a fresh initial pair and `curve_queries` oracle-answered queries.
// Throws InvalidArgument with fewer than 10 seeds.
LearningCurveResult RunLearningCurve(const Corpus& corpus,
                                     const ExperimentConfig& config);

struct SessionResult {
  Condition condition = Condition::kAL;
  Stage stage = Stage::kEarly;
  std::string profile;
  std::uint64_t seed = 0;
  double initial_accuracy = 0.0;
  double initial_f1 = 0.0;
  double final_accuracy = 0.0;
  double final_f1 = 0.0;
  double accuracy_improvement = 0.0;
  double f1_improvement = 0.0;
  double label_accuracy = 0.0;   // Labels matching ground truth.
  double agreement_rate = 0.0;   // Labels matching the model prediction.
  std::optional<double> wrong_agreement_rate;  // Unset without agreements.
  std::vector<int> labels;
  std::vector<CurvePoint> curve;
  std::map<std::string, std::int64_t> feedback_counts;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct AggregateRow {
  Condition condition = Condition::kAL;
  Stage stage = Stage::kEarly;
  std::string profile;
  int runs = 0;
  MeanSe final_accuracy, final_f1, accuracy_improvement, f1_improvement,
      label_accuracy, agreement_rate, wrong_agreement_rate;
};

struct ExperimentReport {
  std::vector<SessionResult> rows;  // Ordered by stage, condition, profile, seed.
  std::vector<AggregateRow> aggregates;
};

// Early stage: `queries` queries from the seed's initial pair. Late stage:
// `queries` queries continuing the `late_stage_queries` oracle simulation
// from the same pair.
ExperimentReport RunSnapshotExperiment(const Corpus& corpus,
                                       const ExperimentConfig& config);

struct ComparisonRow {
  Condition condition = Condition::kAL;
  Stage stage = Stage::kEarly;
  std::string profile;
  double knowledge = 0.0;
  double anchor = 0.0;
  std::uint64_t seed = 0;
  double agreement_rate = 0.0;
  std::optional<double> wrong_agreement_rate;
  double label_accuracy = 0.0;
  double final_accuracy = 0.0;
  std::vector<int> labels;
};

// Anchored profiles over the (knowledge x anchor) grid, matched seeds across
// conditions. Throws InvalidArgument with fewer than two conditions.
std::vector<ComparisonRow> CompareConditions(const Corpus& corpus,
                                             const ExperimentConfig& config);

// One simulated session; exposed for tests and the service's simulators.
SessionResult RunSimulatedSession(const Corpus& corpus,
                                  const ExperimentConfig& config,
                                  Condition condition, Stage stage,
                                  const AnnotatorProfile& profile,
                                  std::uint64_t seed, const InitialPair& pair,
                                  const LateStageSnapshot* late);

MeanSe Summarize(const std::vector<double>& values);

void WriteCurveCsv(const LearningCurveResult& r, std::ostream& per_seed,
                   std::ostream& mean);
void WriteReportCsv(const ExperimentReport& r, std::ostream& rows,
                    std::ostream& aggregates);
void WriteFeedbackSummaryCsv(const ExperimentReport& r, std::ostream& out);
void WriteComparisonCsv(const std::vector<ComparisonRow>& rows, std::ostream& out);
nlohmann::json Manifest(const std::string& command, const ExperimentConfig& config,
                        const Corpus& corpus);

// Runs fn(0..n-1) on up to `threads` workers (0: hardware concurrency).
// Exceptions are rethrown after all workers finish.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace xal

#endif  // XAL_HARNESS_H_
