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

#ifndef XAL_ANNOTATORS_H_
#define XAL_ANNOTATORS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "xal/condition.h"

namespace xal {

enum class AnnotatorKind { kOracle, kNoisy, kAnchored };

// Behavioral parameters of a simulated teacher.
//   knowledge    probability of judging an instance correctly on one's own
//   anchor       probability of adopting a shown model prediction
//   rating_gap   mean rating shift between correct and incorrect predictions
struct AnnotatorProfile {
  std::string name;
  AnnotatorKind kind = AnnotatorKind::kOracle;
  double knowledge = 1.0;
  double anchor = 0.0;
  double rating_gap = 0.0;
  std::uint64_t seed = 0;

  static AnnotatorProfile Oracle(std::uint64_t seed = 0);
  static AnnotatorProfile Noisy(double knowledge, std::uint64_t seed = 0);
  static AnnotatorProfile Anchored(double knowledge, double anchor,
                                   std::uint64_t seed = 0);

  // Throws InvalidArgument unless knowledge in [0.5, 1], anchor in [0, 1],
  // rating_gap >= 0, and oracle profiles have knowledge 1 and anchor 0.
  void Validate() const;
};

inline constexpr double kDefaultHumanKnowledge = 0.65;

std::string_view ToString(AnnotatorKind kind);
AnnotatorKind ParseAnnotatorKind(std::string_view s);

nlohmann::json ProfileToJson(const AnnotatorProfile& p);
// Accepts {"kind", "q"|"knowledge", "alpha"|"anchor", "g"|"rating_gap",
// "seed", "name"}.
AnnotatorProfile ProfileFromJson(const nlohmann::json& j);

// What a simulator may see of a query. The ground truth travels on this
// channel only; the AL engine never receives it.
struct QueryContext {
  int ground_truth = 0;
  std::optional<int> shown_prediction;  // Set under CL and XAL.
  Condition condition = Condition::kAL;
};

// Owns two random streams seeded from the profile: one for labels, one for
// ratings, so that drawing ratings never perturbs the label sequence.
class SimulatedAnnotator {
 public:
  explicit SimulatedAnnotator(AnnotatorProfile profile);

  int Answer(const QueryContext& query);

  // Integer rating in 1..5 drawn from a discretized Gaussian whose mean is
  // 3 + g/2 for a correct prediction and 3 - g/2 otherwise (clamped to the
  // scale).
  int RateExplanation(bool model_correct);

  const AnnotatorProfile& profile() const { return profile_; }

 private:
  AnnotatorProfile profile_;
  std::mt19937_64 label_rng_;
  std::mt19937_64 rating_rng_;
  std::array<double, 5> pmf_correct_{};
  std::array<double, 5> pmf_incorrect_{};
};

// Probabilities over ratings 1..5 of a unit-variance Gaussian discretized
// to the scale, with its location solved so the discrete mean equals
// `target_mean` (clamped to [1, 5]).
std::array<double, 5> RatingDistribution(double target_mean);

}  // namespace xal

#endif  // XAL_ANNOTATORS_H_
