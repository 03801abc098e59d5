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

#include "support/fixtures.h"

#include <cmath>

namespace xal::testing {

std::string AdultDataPath() { return std::string(XAL_TEST_DATA_DIR) + "/adult.data"; }

FeatureSchema NumericSchema(std::size_t d) {
  std::vector<FeatureSpec> specs(d);
  for (std::size_t j = 0; j < d; ++j) specs[j].name = "f" + std::to_string(j);
  return FeatureSchema(std::move(specs));
}

std::vector<TrainingExample> RandomExamples(std::mt19937_64& rng, int n, int d,
                                            bool weighted) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd truth(d);
  for (int j = 0; j < d; ++j) truth[j] = 1.5 * normal(rng);
  std::vector<TrainingExample> out;
  for (int i = 0; i < n; ++i) {
    TrainingExample e;
    e.id = i;
    e.x = Eigen::VectorXd(d);
    for (int j = 0; j < d; ++j) e.x[j] = normal(rng);
    const double p = 1.0 / (1.0 + std::exp(-(truth.dot(e.x) + 0.3)));
    e.label = unit(rng) < p ? 1 : 0;
    e.weight = weighted ? 0.2 + 1.8 * unit(rng) : 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<EncodedInstance> RandomPool(std::mt19937_64& rng, int n, int d,
                                        std::int64_t first_id) {
  std::normal_distribution<double> normal;
  std::vector<EncodedInstance> pool;
  for (int i = 0; i < n; ++i) {
    EncodedInstance inst;
    inst.id = first_id + i;
    inst.x = Eigen::VectorXd(d);
    for (int j = 0; j < d; ++j) inst.x[j] = normal(rng);
    inst.y = normal(rng) > 0 ? 1 : 0;
    pool.push_back(std::move(inst));
  }
  return pool;
}

LinearModel RandomModel(std::mt19937_64& rng, std::size_t d, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  LinearModel m = LinearModel::Zero(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) m.weights[static_cast<Eigen::Index>(j)] = normal(rng);
  m.intercept = normal(rng);
  m.trained = true;
  return m;
}

PlantedSpurious MakePlantedSpurious(std::uint64_t seed, int labeled, int pool,
                                    double agreement) {
  std::vector<FeatureSpec> specs(3);
  specs[0].name = "signal";
  specs[1].name = "noise";
  specs[2].name = "marker";
  specs[2].kind = FeatureKind::kCategorical;
  specs[2].categories = {"a", "b"};

  PlantedSpurious out;
  out.schema = std::make_shared<const FeatureSchema>(std::move(specs));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto make = [&](std::int64_t id, bool planted) {
    EncodedInstance inst;
    inst.id = id;
    inst.x = Eigen::VectorXd::Zero(4);
    inst.x[0] = normal(rng);
    inst.x[1] = normal(rng);
    inst.y = inst.x[0] + 0.5 * normal(rng) > 0.0 ? 1 : 0;
    int marker = unit(rng) < 0.5 ? 1 : 0;  // 1 = "a"
    if (planted) marker = unit(rng) < agreement ? inst.y : 1 - inst.y;
    inst.x[marker == 1 ? 2 : 3] = 1.0;
    return inst;
  };

  for (int i = 0; i < labeled; ++i) {
    EncodedInstance inst = make(i, true);
    out.pool.push_back(inst);
    out.labeled.push_back({inst.id, inst.x, inst.y, 1.0});
    const bool marker_a = inst.x[2] == 1.0;
    if (out.witness < 0 && marker_a == (inst.y == 1)) out.witness = inst.id;
  }
  for (int i = 0; i < pool; ++i) out.pool.push_back(make(labeled + i, false));
  return out;
}

std::string AdultSnippet() {
  return "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, "
         "Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K\n"
         "50, Self-emp-not-inc, 83311, Bachelors, 13, Married-civ-spouse, "
         "Exec-managerial, Husband, White, Male, 0, 0, 13, United-States, <=50K\n"
         "38, Private, 215646, HS-grad, 9, Divorced, Handlers-cleaners, "
         "Not-in-family, White, Male, 0, 0, 40, United-States, <=50K\n"
         "52, Self-emp-not-inc, 209642, HS-grad, 9, Married-civ-spouse, "
         "Exec-managerial, Husband, White, Male, 0, 0, 45, United-States, >50K\n"
         "54, ?, 180211, Some-college, 10, Married-civ-spouse, ?, Husband, "
         "Asian-Pac-Islander, Male, 0, 0, 60, South, >50K\n"
         "31, Private, 45781, Masters, 14, Never-married, Prof-specialty, "
         "Not-in-family, White, Female, 14084, 0, 50, United-States, >50K\n";
}

}  // namespace xal::testing
