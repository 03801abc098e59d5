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

#include "xal/explainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xal/errors.h"

namespace xal {
namespace {

bool ByMagnitude(const Contribution& a, const Contribution& b) {
  const double ma = std::abs(a.contribution);
  const double mb = std::abs(b.contribution);
  if (ma != mb) return ma > mb;
  return a.feature < b.feature;
}

}  // namespace

std::vector<Contribution> FeatureContributions(const LinearModel& model,
                                               const FeatureSchema& schema,
                                               const Eigen::VectorXd& x) {
  const auto dim = static_cast<Eigen::Index>(schema.dimension());
  if (model.weights.size() != dim || x.size() != dim) {
    throw InvalidArgument("explainer: schema dimension mismatch");
  }
  if (model.schema_fingerprint != 0 &&
      model.schema_fingerprint != schema.Fingerprint()) {
    throw InvalidArgument("explainer: model was trained on a different schema");
  }
  std::vector<Contribution> out;
  out.reserve(schema.feature_count());
  for (std::size_t i = 0; i < schema.feature_count(); ++i) {
    const auto& f = schema.feature(i);
    const auto offset = static_cast<Eigen::Index>(f.offset);
    const auto width = static_cast<Eigen::Index>(f.width);
    const double c = model.weights.segment(offset, width).dot(x.segment(offset, width));
    out.push_back({f.name, schema.DisplayValue(i, x), c});
  }
  return out;
}

Explanation Explain(const LinearModel& model, const FeatureSchema& schema,
                    const Eigen::VectorXd& x, int k) {
  if (k < 1) throw InvalidArgument("explain: k must be >= 1");
  auto all = FeatureContributions(model, schema, x);
  std::sort(all.begin(), all.end(), ByMagnitude);
  const auto shown = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());

  Explanation e;
  e.contributions.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(shown));
  for (std::size_t i = shown; i < all.size(); ++i) e.residual += all[i].contribution;
  std::stable_partition(e.contributions.begin(), e.contributions.end(),
                        [](const Contribution& c) { return c.contribution > 0.0; });
  e.shown_count = static_cast<int>(shown);
  e.intercept_contribution = model.intercept;
  e.logit = Logit(model, x);
  e.probability = Sigmoid(e.logit);
  e.predicted_label = e.logit > 0.0 ? 1 : 0;
  return e;
}

double AggregatedWeight(const LinearModel& model, const FeatureSchema& schema,
                        std::size_t feature) {
  const FeatureSpec& f = schema.feature(feature);
  if (static_cast<std::size_t>(model.weights.size()) != schema.dimension()) {
    throw InvalidArgument("model dimension does not match schema");
  }
  const auto block = model.weights.segment(static_cast<Eigen::Index>(f.offset),
                                           static_cast<Eigen::Index>(f.width));
  if (f.kind == FeatureKind::kNumeric) return std::abs(block[0]);
  return block.maxCoeff() - block.minCoeff();
}

bool IsComplete(const Explanation& e, double tolerance) {
  double sum = e.residual + e.intercept_contribution;
  for (const auto& c : e.contributions) sum += c.contribution;
  return std::abs(sum - e.logit) <= tolerance * std::max(1.0, std::abs(e.logit));
}

nlohmann::json ExplanationToJson(const Explanation& e) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const auto& c : e.contributions) {
    contributions.push_back(
        {{"feature", c.feature}, {"value", c.value}, {"contribution", c.contribution}});
  }
  return {{"contributions", contributions},
          {"intercept", e.intercept_contribution},
          {"probability", e.probability},
          {"predicted_label", e.predicted_label},
          {"residual", e.residual},
          {"logit", e.logit},
          {"shown_count", e.shown_count}};
}

Explanation ExplanationFromJson(const nlohmann::json& j) {
  try {
    Explanation e;
    for (const auto& c : j.at("contributions")) {
      e.contributions.push_back({c.at("feature").get<std::string>(),
                                 c.at("value").get<std::string>(),
                                 c.at("contribution").get<double>()});
    }
    e.intercept_contribution = j.at("intercept").get<double>();
    e.probability = j.at("probability").get<double>();
    e.predicted_label = j.at("predicted_label").get<int>();
    e.residual = j.at("residual").get<double>();
    e.logit = j.at("logit").get<double>();
    e.shown_count = j.value("shown_count", static_cast<int>(e.contributions.size()));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed explanation record: ") + ex.what());
  }
}

}  // namespace xal
