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

#ifndef XAL_TESTS_SUPPORT_FIXTURES_H_
#define XAL_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xal/dataset.h"
#include "xal/linear_model.h"

namespace xal::testing {

// Path of the bundled UCI Adult training file.
std::string AdultDataPath();

// d standardized numeric features named f0..f{d-1}.
FeatureSchema NumericSchema(std::size_t d);

// n examples with N(0,1) features and labels drawn from a random logistic
// model; weights are 1 unless `weighted`, then uniform in [0.2, 2].
std::vector<TrainingExample> RandomExamples(std::mt19937_64& rng, int n, int d,
                                            bool weighted = false);

std::vector<EncodedInstance> RandomPool(std::mt19937_64& rng, int n, int d,
                                        std::int64_t first_id = 0);

LinearModel RandomModel(std::mt19937_64& rng, std::size_t d, double scale = 1.0);

// Planted-spurious-feature family. Two informative numerics ("signal",
// "noise") and one binary categorical "marker" that is independent of the
// label in the pool but agrees with the label on most of the labeled set.
struct PlantedSpurious {
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<EncodedInstance> pool;
  std::vector<TrainingExample> labeled;
  std::string planted = "marker";
  std::int64_t witness = -1;  // A labeled id whose marker matches its label.
};

PlantedSpurious MakePlantedSpurious(std::uint64_t seed, int labeled = 30,
                                    int pool = 400, double agreement = 0.9);

// A few Adult-format rows (15 columns) for loader tests.
std::string AdultSnippet();

}  // namespace xal::testing

#endif  // XAL_TESTS_SUPPORT_FIXTURES_H_
