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

#ifndef XAL_EXPLAINER_H_
#define XAL_EXPLAINER_H_

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "xal/dataset.h"
#include "xal/linear_model.h"

namespace xal {

struct Contribution {
  std::string feature;
  std::string value;  // Raw attribute value as shown to the annotator.
  double contribution = 0.0;
};

// Local feature-importance explanation of one prediction.
//
// `contributions` holds the shown features in display order: positive
// contributions first, then the rest, each group by decreasing magnitude.
// `residual` is the summed contribution of the features that were not
// shown, so that
//   sum(contributions) + residual + intercept_contribution == logit.
struct Explanation {
  std::vector<Contribution> contributions;
  double intercept_contribution = 0.0;
  int shown_count = 0;
  int predicted_label = 0;
  double probability = 0.5;
  double logit = 0.0;
  double residual = 0.0;
};

inline constexpr int kDefaultTopFeatures = 5;

// Per original feature, the sum over its encoded dimensions of weight times
// value, in schema order. For a one-hot feature this is the weight of the
// active category. Throws InvalidArgument on a schema/model mismatch.
std::vector<Contribution> FeatureContributions(const LinearModel& model,
                                               const FeatureSchema& schema,
                                               const Eigen::VectorXd& x);

// Top-k features by |contribution| (ties: feature name ascending). k larger
// than the feature count shows every feature. Throws InvalidArgument if k < 1.
Explanation Explain(const LinearModel& model, const FeatureSchema& schema,
                    const Eigen::VectorXd& x, int k = kDefaultTopFeatures);

// |sum + residual + intercept - logit| <= tol * max(1, |logit|).
bool IsComplete(const Explanation& e, double tolerance = 1e-9);

// Global weight magnitude of one original feature: |w| for a numeric
// feature; for a categorical, max - min over its one-hot block, the largest
// logit change obtainable by switching the category.
double AggregatedWeight(const LinearModel& model, const FeatureSchema& schema,
                        std::size_t feature);

nlohmann::json ExplanationToJson(const Explanation& e);
Explanation ExplanationFromJson(const nlohmann::json& j);

}  // namespace xal

#endif  // XAL_EXPLAINER_H_
