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

#include "xal/feedback.h"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "xal/al_engine.h"
#include "xal/errors.h"

namespace xal {
namespace {

using nlohmann::json;

std::uint64_t Mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running state.
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view ToString(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::kLabel: return "label";
    case FeedbackKind::kAgreement: return "agreement";
    case FeedbackKind::kExplanationRating: return "explanation_rating";
    case FeedbackKind::kFeatureAdjustment: return "feature_adjustment";
    case FeedbackKind::kFeatureRank: return "feature_rank";
    case FeedbackKind::kRelationNote: return "relation_note";
  }
  return "?";
}

std::string_view ToString(AdjustmentAction action) {
  switch (action) {
    case AdjustmentAction::kIncrease: return "increase";
    case AdjustmentAction::kDecrease: return "decrease";
    case AdjustmentAction::kRemove: return "remove";
    case AdjustmentAction::kFlipSign: return "flip_sign";
  }
  return "?";
}

AdjustmentAction ParseAdjustmentAction(std::string_view s) {
  if (s == "increase") return AdjustmentAction::kIncrease;
  if (s == "decrease") return AdjustmentAction::kDecrease;
  if (s == "remove") return AdjustmentAction::kRemove;
  if (s == "flip_sign") return AdjustmentAction::kFlipSign;
  throw InvalidArgument("unknown feature adjustment '" + std::string(s) + "'");
}

void ValidateFeedback(const FeedbackRecord& record, const FeatureSchema& schema) {
  auto require_feature = [&](const std::string& name) {
    if (!schema.FindFeature(name)) {
      throw InvalidArgument("feedback names unknown feature '" + name + "'");
    }
  };
  std::visit(Overloaded{
                 [](const LabelFeedback& f) {
                   if (f.label != 0 && f.label != 1) {
                     throw InvalidArgument("label feedback must be 0 or 1");
                   }
                 },
                 [](const AgreementFeedback&) {},
                 [](const ExplanationRating& f) {
                   if (f.rating < 1 || f.rating > 5) {
                     throw InvalidArgument("explanation rating must lie in 1..5");
                   }
                 },
                 [&](const FeatureAdjustment& f) { require_feature(f.feature); },
                 [&](const FeatureRank& f) {
                   require_feature(f.above);
                   require_feature(f.below);
                   if (f.above == f.below) {
                     throw InvalidArgument("feature rank compares '" + f.above +
                                           "' with itself");
                   }
                 },
                 [](const RelationNote&) {},
             },
             record.payload);
}

json FeedbackToJson(const FeedbackRecord& record) {
  json j = {{"kind", ToString(record.kind())},
            {"instance_id", record.instance_id},
            {"timestamp", record.timestamp}};
  std::visit(Overloaded{
                 [&](const LabelFeedback& f) { j["label"] = f.label; },
                 [&](const AgreementFeedback& f) { j["agrees"] = f.agrees; },
                 [&](const ExplanationRating& f) { j["rating"] = f.rating; },
                 [&](const FeatureAdjustment& f) {
                   j["feature"] = f.feature;
                   j["action"] = ToString(f.action);
                 },
                 [&](const FeatureRank& f) {
                   j["above"] = f.above;
                   j["below"] = f.below;
                 },
                 [&](const RelationNote& f) { j["text"] = f.text; },
             },
             record.payload);
  return j;
}

FeedbackRecord FeedbackFromJson(const json& j) {
  try {
    FeedbackRecord r;
    r.instance_id = j.at("instance_id").get<std::int64_t>();
    r.timestamp = j.value("timestamp", 0.0);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "label") {
      r.payload = LabelFeedback{j.at("label").get<int>()};
    } else if (kind == "agreement") {
      r.payload = AgreementFeedback{j.at("agrees").get<bool>()};
    } else if (kind == "explanation_rating") {
      r.payload = ExplanationRating{j.at("rating").get<int>()};
    } else if (kind == "feature_adjustment") {
      r.payload = FeatureAdjustment{j.at("feature").get<std::string>(),
                                    ParseAdjustmentAction(j.at("action").get<std::string>())};
    } else if (kind == "feature_rank") {
      r.payload = FeatureRank{j.at("above").get<std::string>(),
                              j.at("below").get<std::string>()};
    } else if (kind == "relation_note") {
      r.payload = RelationNote{j.at("text").get<std::string>()};
    } else {
      throw InvalidArgument("unknown feedback kind '" + kind + "'");
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed feedback record: ") + e.what());
  }
}

double RatingToWeight(int rating, bool agreement) {
  if (rating < 1 || rating > 5) throw InvalidArgument("rating must lie in 1..5");
  if (agreement) return 1.0;
  return 1.0 - (rating - 1) / 8.0;
}

std::vector<EncodedInstance> Counterexamples(
    const EncodedInstance& source, int label, std::string_view feature, int m,
    std::span<const EncodedInstance> pool, const FeatureSchema& schema,
    std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("counterexample count must be >= 1");
  if (pool.empty()) throw InvalidArgument("counterexamples need a non-empty pool");
  if (label != 0 && label != 1) throw InvalidArgument("label must be 0 or 1");
  const auto fi = schema.FindFeature(feature);
  if (!fi) throw InvalidArgument("unknown feature '" + std::string(feature) + "'");
  const FeatureSpec& f = schema.feature(*fi);
  const auto offset = static_cast<Eigen::Index>(f.offset);
  const auto width = static_cast<Eigen::Index>(f.width);
  if (source.x.size() != static_cast<Eigen::Index>(schema.dimension())) {
    throw InvalidArgument("source instance does not match schema");
  }

  // Candidate pool rows; sampling a row uniformly reproduces the marginal.
  auto block_equal = [&](const Eigen::VectorXd& x) {
    return x.segment(offset, width) == source.x.segment(offset, width);
  };
  std::vector<std::size_t> candidates;
  bool varies = false;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!varies && pool[i].x.segment(offset, width) != pool[0].x.segment(offset, width)) {
      varies = true;
    }
    if (!block_equal(pool[i].x)) candidates.push_back(i);
  }
  if (!varies) {
    throw InvalidArgument("feature '" + f.name +
                          "' has a single observed value in the pool");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::vector<EncodedInstance> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    EncodedInstance copy = source;
    copy.y = label;
    copy.x.segment(offset, width) = pool[candidates[pick(rng)]].x.segment(offset, width);
    out.push_back(std::move(copy));
  }
  return out;
}

bool IsTrainingConsumed(const FeedbackRecord& record) {
  switch (record.kind()) {
    case FeedbackKind::kAgreement:
    case FeedbackKind::kExplanationRating:
      return true;
    case FeedbackKind::kFeatureAdjustment:
      return std::get<FeatureAdjustment>(record.payload).action ==
             AdjustmentAction::kRemove;
    default:
      return false;
  }
}

std::vector<TrainingExample> BuildFeedbackTrainingSet(
    std::span<const TrainingExample> labeled,
    std::span<const FeedbackRecord> records,
    std::span<const EncodedInstance> pool, const FeatureSchema& schema,
    int counterexamples_per_removal, std::uint64_t seed) {
  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < labeled.size(); ++i) index.emplace(labeled[i].id, i);

  std::vector<TrainingExample> out(labeled.begin(), labeled.end());
  std::unordered_map<std::int64_t, bool> agreement;
  std::unordered_map<std::int64_t, int> rating;
  std::vector<std::pair<std::size_t, const FeatureAdjustment*>> removals;
  for (const auto& r : records) {
    const auto it = index.find(r.instance_id);
    if (it == index.end()) {
      throw InvalidArgument("feedback references unknown instance " +
                            std::to_string(r.instance_id));
    }
    ValidateFeedback(r, schema);
    if (const auto* a = std::get_if<AgreementFeedback>(&r.payload)) {
      agreement[r.instance_id] = a->agrees;
    } else if (const auto* g = std::get_if<ExplanationRating>(&r.payload)) {
      rating[r.instance_id] = g->rating;
    } else if (const auto* adj = std::get_if<FeatureAdjustment>(&r.payload)) {
      if (adj->action == AdjustmentAction::kRemove) removals.emplace_back(it->second, adj);
    }
  }
  for (const auto& [id, g] : rating) {
    const auto a = agreement.find(id);
    if (a == agreement.end()) continue;
    out[index.at(id)].weight *= RatingToWeight(g, a->second);
  }

  for (std::size_t k = 0; k < removals.size(); ++k) {
    const auto& source = labeled[removals[k].first];
    const auto& feature = removals[k].second->feature;
    std::uint64_t s = Mix(seed, static_cast<std::uint64_t>(source.id));
    s = Mix(s, *schema.FindFeature(feature));
    s = Mix(s, k);
    EncodedInstance src{source.id, source.x, source.label};
    for (auto& c : Counterexamples(src, source.label, feature,
                                   counterexamples_per_removal, pool, schema, s)) {
      const auto synthetic = -static_cast<std::int64_t>(out.size() - labeled.size()) - 1;
      out.push_back({synthetic, std::move(c.x), c.y, 1.0});
    }
  }
  return out;
}

LinearModel ApplyFeedback(const ALSession& session,
                          std::span<const FeedbackRecord> records,
                          int counterexamples_per_removal) {
  const auto training = session.TrainingSet();
  const auto fingerprint = session.schema().Fingerprint();
  if (records.empty()) return Train(training, session.config().train, fingerprint);
  const auto augmented = BuildFeedbackTrainingSet(
      training, records, session.split().pool, session.schema(),
      counterexamples_per_removal, session.config().seed);
  return Train(augmented, session.config().train, fingerprint);
}

std::map<std::string, std::int64_t> SummarizeFeedback(
    std::span<const FeedbackRecord> records) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& r : records) {
    ++counts[std::string(ToString(r.kind()))];
    if (const auto* adj = std::get_if<FeatureAdjustment>(&r.payload)) {
      ++counts["feature_adjustment:" + std::string(ToString(adj->action))];
    }
  }
  return counts;
}

}  // namespace xal
