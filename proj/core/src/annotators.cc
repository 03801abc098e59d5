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

#include "xal/annotators.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "xal/errors.h"

namespace xal {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

double Uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double Mean(const std::array<double, 5>& pmf) {
  double m = 0.0;
  for (int k = 0; k < 5; ++k) m += (k + 1) * pmf[k];
  return m;
}

std::array<double, 5> DiscreteGaussian(double location) {
  std::array<double, 5> pmf{};
  double total = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double d = (k + 1) - location;
    pmf[k] = std::exp(-0.5 * d * d);
    total += pmf[k];
  }
  if (!(total > 0.0)) {
    // Far-away location: all mass on the nearest end of the scale.
    pmf.fill(0.0);
    pmf[location < 3.0 ? 0 : 4] = 1.0;
    return pmf;
  }
  for (auto& p : pmf) p /= total;
  return pmf;
}

constexpr std::uint64_t kRatingStreamSalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::string_view ToString(Condition c) {
  switch (c) {
    case Condition::kAL: return "AL";
    case Condition::kCL: return "CL";
    case Condition::kXAL: return "XAL";
  }
  return "?";
}

std::string_view ToString(Stage s) {
  return s == Stage::kEarly ? "early" : "late";
}

Condition ParseCondition(std::string_view s) {
  const auto l = Lower(s);
  if (l == "al") return Condition::kAL;
  if (l == "cl") return Condition::kCL;
  if (l == "xal") return Condition::kXAL;
  throw InvalidArgument("unknown condition '" + std::string(s) + "'");
}

Stage ParseStage(std::string_view s) {
  const auto l = Lower(s);
  if (l == "early") return Stage::kEarly;
  if (l == "late") return Stage::kLate;
  throw InvalidArgument("unknown stage '" + std::string(s) + "'");
}

AnnotatorProfile AnnotatorProfile::Oracle(std::uint64_t seed) {
  AnnotatorProfile p;
  p.name = "oracle";
  p.seed = seed;
  return p;
}

AnnotatorProfile AnnotatorProfile::Noisy(double knowledge, std::uint64_t seed) {
  AnnotatorProfile p;
  p.kind = AnnotatorKind::kNoisy;
  p.knowledge = knowledge;
  p.seed = seed;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "noisy(q=%.2f)", knowledge);
  p.name = buf;
  return p;
}

AnnotatorProfile AnnotatorProfile::Anchored(double knowledge, double anchor,
                                            std::uint64_t seed) {
  AnnotatorProfile p;
  p.kind = AnnotatorKind::kAnchored;
  p.knowledge = knowledge;
  p.anchor = anchor;
  p.seed = seed;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "anchored(q=%.2f,alpha=%.2f)", knowledge, anchor);
  p.name = buf;
  return p;
}

void AnnotatorProfile::Validate() const {
  if (!(knowledge >= 0.5 && knowledge <= 1.0)) {
    throw InvalidArgument("annotator knowledge must lie in [0.5, 1]");
  }
  if (!(anchor >= 0.0 && anchor <= 1.0)) {
    throw InvalidArgument("annotator anchor strength must lie in [0, 1]");
  }
  if (!(rating_gap >= 0.0) || !std::isfinite(rating_gap)) {
    throw InvalidArgument("annotator rating gap must be >= 0");
  }
  if (kind == AnnotatorKind::kOracle && (knowledge != 1.0 || anchor != 0.0)) {
    throw InvalidArgument("oracle profile requires knowledge 1 and anchor 0");
  }
  if (kind == AnnotatorKind::kNoisy && anchor != 0.0) {
    throw InvalidArgument("noisy profile takes no anchor strength");
  }
}

std::string_view ToString(AnnotatorKind kind) {
  switch (kind) {
    case AnnotatorKind::kOracle: return "oracle";
    case AnnotatorKind::kNoisy: return "noisy";
    case AnnotatorKind::kAnchored: return "anchored";
  }
  return "?";
}

AnnotatorKind ParseAnnotatorKind(std::string_view s) {
  const auto l = Lower(s);
  if (l == "oracle") return AnnotatorKind::kOracle;
  if (l == "noisy") return AnnotatorKind::kNoisy;
  if (l == "anchored") return AnnotatorKind::kAnchored;
  throw InvalidArgument("unknown annotator kind '" + std::string(s) + "'");
}

nlohmann::json ProfileToJson(const AnnotatorProfile& p) {
  return {{"name", p.name},      {"kind", ToString(p.kind)},
          {"q", p.knowledge},    {"alpha", p.anchor},
          {"g", p.rating_gap},   {"seed", p.seed}};
}

AnnotatorProfile ProfileFromJson(const nlohmann::json& j) {
  try {
    AnnotatorProfile p;
    p.kind = ParseAnnotatorKind(j.at("kind").get<std::string>());
    if (p.kind != AnnotatorKind::kOracle) {
      p.knowledge = j.contains("q") ? j.at("q").get<double>()
                                    : j.value("knowledge", kDefaultHumanKnowledge);
    }
    if (p.kind == AnnotatorKind::kAnchored) {
      p.anchor = j.contains("alpha") ? j.at("alpha").get<double>()
                                     : j.value("anchor", 0.0);
    }
    p.rating_gap = j.contains("g") ? j.at("g").get<double>()
                                   : j.value("rating_gap", 0.0);
    p.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("name")) {
      p.name = j.at("name").get<std::string>();
    } else if (p.kind == AnnotatorKind::kOracle) {
      p.name = "oracle";
    } else {
      char buf[80];
      std::snprintf(buf, sizeof(buf), "%s(q=%.2f,alpha=%.2f)",
                    std::string(ToString(p.kind)).c_str(), p.knowledge, p.anchor);
      p.name = buf;
    }
    p.Validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed annotator profile: ") + e.what());
  }
}

std::array<double, 5> RatingDistribution(double target_mean) {
  const double target = std::clamp(target_mean, 1.0, 5.0);
  std::array<double, 5> pmf{};
  if (target <= 1.0 + 1e-12) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (target >= 5.0 - 1e-12) {
    pmf[4] = 1.0;
    return pmf;
  }
  // The discrete mean is increasing in the location; bisect.
  double lo = -40.0, hi = 46.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (Mean(DiscreteGaussian(mid)) < target ? lo : hi) = mid;
  }
  return DiscreteGaussian(0.5 * (lo + hi));
}

SimulatedAnnotator::SimulatedAnnotator(AnnotatorProfile profile)
    : profile_(std::move(profile)),
      label_rng_(profile_.seed),
      rating_rng_(profile_.seed ^ kRatingStreamSalt) {
  profile_.Validate();
  pmf_correct_ = RatingDistribution(3.0 + profile_.rating_gap / 2.0);
  pmf_incorrect_ = RatingDistribution(3.0 - profile_.rating_gap / 2.0);
}

int SimulatedAnnotator::Answer(const QueryContext& query) {
  if (query.ground_truth != 0 && query.ground_truth != 1) {
    throw InvalidArgument("ground truth must be 0 or 1");
  }
  if (profile_.kind == AnnotatorKind::kOracle) return query.ground_truth;
  // Both draws happen on every call so that the stream position does not
  // depend on the condition.
  const double anchor_draw = Uniform(label_rng_);
  const double knowledge_draw = Uniform(label_rng_);
  if (profile_.kind == AnnotatorKind::kAnchored && query.shown_prediction &&
      ShowsPrediction(query.condition) && anchor_draw < profile_.anchor) {
    return *query.shown_prediction;
  }
  return knowledge_draw < profile_.knowledge ? query.ground_truth
                                             : 1 - query.ground_truth;
}

int SimulatedAnnotator::RateExplanation(bool model_correct) {
  const auto& pmf = model_correct ? pmf_correct_ : pmf_incorrect_;
  const double u = Uniform(rating_rng_);
  double cumulative = 0.0;
  for (int k = 0; k < 4; ++k) {
    cumulative += pmf[k];
    if (u < cumulative) return k + 1;
  }
  return 5;
}

}  // namespace xal
