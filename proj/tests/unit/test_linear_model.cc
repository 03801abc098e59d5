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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/fixtures.h"
#include "support/oracles.h"
#include "xal/errors.h"
#include "xal/linear_model.h"

namespace xal {
namespace {

TrainConfig Lambda(double lambda) {
  TrainConfig c;
  c.lambda = lambda;
  return c;
}

TrainingExample Row(std::int64_t id, std::initializer_list<double> x, int y, double w = 1.0) {
  TrainingExample e;
  e.id = id;
  e.x = Eigen::VectorXd(static_cast<Eigen::Index>(x.size()));
  Eigen::Index i = 0;
  for (double v : x) e.x[i++] = v;
  e.label = y;
  e.weight = w;
  return e;
}

TEST(Train, SymmetricSeparablePair) {
  const std::vector<TrainingExample> pair = {Row(0, {-1}, 0), Row(1, {1}, 1)};
  const LinearModel m = Train(pair, Lambda(1.0));
  EXPECT_TRUE(m.converged);
  EXPECT_GT(m.weights[0], 0.0);
  EXPECT_NEAR(m.intercept, 0.0, 1e-12);
}

TEST(Train, GradientVanishesAtSolution) {
  std::mt19937_64 rng(11);
  const auto ex = testing::RandomExamples(rng, 40, 4, true);
  const LinearModel m = Train(ex, Lambda(0.5));
  ASSERT_TRUE(m.converged);
  const Eigen::VectorXd g = testing::CentralDifferenceGradient(ex, m.weights, m.intercept, 0.5);
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-6);
}

class FiniteDifference : public ::testing::TestWithParam<int> {};

TEST_P(FiniteDifference, AnalyticGradientMatches) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  const int d = 1 + GetParam() % 5;
  const auto ex = testing::RandomExamples(rng, 8 + GetParam(), d, GetParam() % 2 == 1);
  const double lambda = 0.1 * (1 + GetParam() % 4);
  const LinearModel m = testing::RandomModel(rng, static_cast<std::size_t>(d), 0.7);
  const Eigen::VectorXd analytic = RegularizedLossGradient(ex, m.weights, m.intercept, lambda);
  const Eigen::VectorXd numeric =
      testing::CentralDifferenceGradient(ex, m.weights, m.intercept, lambda);
  ASSERT_EQ(analytic.size(), numeric.size());
  for (Eigen::Index j = 0; j < analytic.size(); ++j) {
    EXPECT_LE(std::abs(analytic[j] - numeric[j]), 1e-5 * std::max(1.0, std::abs(numeric[j])))
        << "component " << j;
  }
  EXPECT_NEAR(RegularizedLoss(ex, m.weights, m.intercept, lambda),
              testing::NaiveLoss(ex, m.weights, m.intercept, lambda), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FiniteDifference, ::testing::Range(0, 20));

class GridOracle : public ::testing::TestWithParam<int> {};

TEST_P(GridOracle, TrainerIsNeverBeatenByGrid) {
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(GetParam()));
  const auto ex = testing::RandomExamples(rng, 6, 2);
  const LinearModel m = Train(ex, Lambda(1.0));
  const double trained = testing::NaiveLoss(ex, m.weights, m.intercept, 1.0);
  const double grid = testing::GridSearchMinimum(ex, 1.0, -5.0, 5.0, 40);
  EXPECT_LE(trained, grid + 1e-3);
}

INSTANTIATE_TEST_SUITE_P(TinyFixtures, GridOracle, ::testing::Range(0, 5));

TEST(Train, MonotoneRegularization) {
  std::mt19937_64 rng(5);
  const auto ex = testing::RandomExamples(rng, 60, 5);
  double previous = INFINITY;
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double norm = Train(ex, Lambda(lambda)).weights.norm();
    EXPECT_LE(norm, previous + 1e-8) << "lambda " << lambda;
    previous = norm;
  }
}

TEST(Train, HeavyRegularizationCrushesWeights) {
  std::mt19937_64 rng(6);
  const auto ex = testing::RandomExamples(rng, 30, 3);
  EXPECT_LT(Train(ex, Lambda(1e6)).weights.norm(), 1e-2);
}

TEST(Train, BitwiseDeterministicUnderPermutation) {
  std::mt19937_64 rng(7);
  auto ex = testing::RandomExamples(rng, 50, 4, true);
  const LinearModel a = Train(ex, Lambda(1.0));
  std::shuffle(ex.begin(), ex.end(), rng);
  const LinearModel b = Train(ex, Lambda(1.0));
  for (Eigen::Index j = 0; j < a.weights.size(); ++j) EXPECT_EQ(a.weights[j], b.weights[j]);
  EXPECT_EQ(a.intercept, b.intercept);
}

TEST(Train, IntegerWeightEqualsDuplication) {
  std::mt19937_64 rng(8);
  auto ex = testing::RandomExamples(rng, 20, 3);
  auto duplicated = ex;
  for (std::size_t i = 0; i < 5; ++i) {
    ex[i].weight = 2.0;
    auto copy = duplicated[i];
    copy.id += 1000;
    duplicated.push_back(copy);
  }
  const LinearModel a = Train(ex, Lambda(1.0));
  const LinearModel b = Train(duplicated, Lambda(1.0));
  EXPECT_LT((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-8);
}

TEST(Train, SingleClassIsDegenerate) {
  const std::vector<TrainingExample> ex = {Row(0, {1, 2}, 1), Row(1, {0, -1}, 1),
                                           Row(2, {3, 3}, 1)};
  const LinearModel m = Train(ex, Lambda(1.0));
  EXPECT_TRUE(m.degenerate);
  EXPECT_EQ(m.weights.norm(), 0.0);
  EXPECT_DOUBLE_EQ(m.intercept, std::log(4.0 / 1.0));
}

TEST(Train, RejectsBadInput) {
  EXPECT_THROW(Train(std::vector<TrainingExample>{}, Lambda(1.0)), InvalidArgument);
  EXPECT_THROW(Train(std::vector<TrainingExample>{Row(0, {1}, 2)}, Lambda(1.0)), InvalidArgument);
  EXPECT_THROW(Train(std::vector<TrainingExample>{Row(0, {1}, 1, -1.0)}, Lambda(1.0)),
               InvalidArgument);
  EXPECT_THROW(Train(std::vector<TrainingExample>{Row(0, {1}, 1), Row(1, {1, 2}, 0)}, Lambda(1.0)),
               InvalidArgument);
  EXPECT_THROW(Train(std::vector<TrainingExample>{Row(0, {1}, 1)}, Lambda(-1.0)), InvalidArgument);
}

TEST(Predict, HandFixtures) {
  LinearModel zero = LinearModel::Zero(2);
  const Eigen::Vector2d x(1, 1);
  EXPECT_EQ(PredictProba(zero, x), 0.5);
  EXPECT_EQ(Logit(zero, x), 0.0);

  LinearModel m = LinearModel::Zero(2);
  m.weights << 1, -1;
  m.intercept = 0.5;
  EXPECT_DOUBLE_EQ(Logit(m, x), 0.5);
  EXPECT_NEAR(PredictProba(m, x), 0.6225, 1e-4);
  EXPECT_EQ(PredictLabel(m, x), 1);

  m.intercept = 20.0;
  EXPECT_GT(PredictProba(m, x), 0.999);
  EXPECT_THROW(Logit(m, Eigen::Vector3d(1, 1, 1)), InvalidArgument);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(Sigmoid(-1000.0), 0.0);
  EXPECT_EQ(Sigmoid(1000.0), 1.0);
  EXPECT_NEAR(Sigmoid(-30.0), std::exp(-30.0), 1e-25);
  EXPECT_NEAR(Sigmoid(2.0) + Sigmoid(-2.0), 1.0, 1e-15);
}

std::vector<EncodedInstance> Labeled(std::initializer_list<std::pair<double, int>> rows) {
  std::vector<EncodedInstance> out;
  for (const auto& [x, y] : rows) {
    out.push_back({static_cast<std::int64_t>(out.size()), Eigen::VectorXd::Constant(1, x), y});
  }
  return out;
}

TEST(Evaluate, ConfusionMatrixFixtures) {
  LinearModel m = LinearModel::Zero(1);
  m.weights[0] = 1.0;
  const auto balanced = Labeled({{-1, 0}, {-2, 0}, {1, 1}, {2, 1}});
  EXPECT_EQ(Evaluate(m, balanced).accuracy, 1.0);
  EXPECT_EQ(Evaluate(m, balanced).f1, 1.0);

  LinearModel negative = LinearModel::Zero(1);
  negative.intercept = -1.0;
  const auto one_positive = Labeled({{0, 0}, {0, 0}, {0, 0}, {0, 1}});
  EXPECT_EQ(Evaluate(negative, one_positive).accuracy, 0.75);
  EXPECT_EQ(Evaluate(negative, one_positive).f1, 0.0);
  EXPECT_THROW(Evaluate(m, std::vector<EncodedInstance>{}), InvalidArgument);
}

TEST(Serialization, RoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  const auto ex = testing::RandomExamples(rng, 30, 6, true);
  LinearModel m = Train(ex, Lambda(0.3), 0xfeedbeefcafef00dULL);
  const LinearModel back = ParseModel(SerializeModel(m));
  ASSERT_EQ(back.weights.size(), m.weights.size());
  for (Eigen::Index j = 0; j < m.weights.size(); ++j) EXPECT_EQ(back.weights[j], m.weights[j]);
  EXPECT_EQ(back.intercept, m.intercept);
  EXPECT_EQ(back.lambda, m.lambda);
  EXPECT_EQ(back.schema_fingerprint, m.schema_fingerprint);
  EXPECT_THROW(ParseModel("{not json"), Error);
}

}  // namespace
}  // namespace xal
