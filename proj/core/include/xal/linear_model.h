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

#ifndef XAL_LINEAR_MODEL_H_
#define XAL_LINEAR_MODEL_H_

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "xal/dataset.h"

namespace xal {

struct TrainConfig {
  double lambda = 1.0;
  int max_iterations = 100;
  double gradient_tolerance = 1e-9;
};

// A labeled, optionally weighted, training row. Ids order the rows before
// fitting so that the result does not depend on caller ordering.
struct TrainingExample {
  std::int64_t id = 0;
  Eigen::VectorXd x;
  int label = 0;
  double weight = 1.0;
};

// L2-regularized logistic regression over encoded dimensions. The intercept
// is not penalized.
struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double lambda = 1.0;
  std::uint64_t schema_fingerprint = 0;
  bool trained = false;
  // Fitted on a single-class set: weights are zero and the intercept is the
  // add-one smoothed class log-odds.
  bool degenerate = false;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // Infinity norm at the returned solution.

  // Untrained zero model of the given dimension.
  static LinearModel Zero(std::size_t dimension, double lambda = 1.0);

  Eigen::Index dimension() const { return weights.size(); }
};

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

LinearModel Train(std::span<const TrainingExample> examples,
                  const TrainConfig& config,
                  std::uint64_t schema_fingerprint = 0);

// Objective minimized by Train at (weights, intercept):
//   sum_i weight_i * [log(1 + exp(z_i)) - y_i z_i] + lambda/2 * |weights|^2.
double RegularizedLoss(std::span<const TrainingExample> examples,
                       const Eigen::VectorXd& weights, double intercept,
                       double lambda);
// Gradient of RegularizedLoss; the last entry is the intercept derivative.
Eigen::VectorXd RegularizedLossGradient(std::span<const TrainingExample> examples,
                                        const Eigen::VectorXd& weights,
                                        double intercept, double lambda);

double Logit(const LinearModel& model, const Eigen::VectorXd& x);
double PredictProba(const LinearModel& model, const Eigen::VectorXd& x);
// 1 iff logit > 0; an exact 0.5 probability predicts the negative class.
int PredictLabel(const LinearModel& model, const Eigen::VectorXd& x);

double Sigmoid(double z);

// Throws InvalidArgument on an empty test set.
Metrics Evaluate(const LinearModel& model,
                 std::span<const EncodedInstance> test);

// Text record: schema fingerprint, lambda, intercept and weights. Doubles
// round-trip exactly.
nlohmann::json ModelToJson(const LinearModel& model);
LinearModel ModelFromJson(const nlohmann::json& j);
std::string SerializeModel(const LinearModel& model);
LinearModel ParseModel(const std::string& text);

}  // namespace xal

#endif  // XAL_LINEAR_MODEL_H_
