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

#include "xal/al_engine.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "xal/errors.h"

namespace xal {
namespace {

using nlohmann::json;

std::string HexDigest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// FNV-1a over the raw bytes of the weights and intercept.
std::uint64_t WeightDigest(const LinearModel& m) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) mix(m.weights[i]);
  mix(m.intercept);
  return h;
}

// Entropy argmax over a sequence of (id, x) accessed through `at`.
template <typename At>
std::size_t ArgmaxEntropy(const LinearModel& model, std::size_t n, At at) {
  std::size_t best = n;
  double best_h = -1.0;
  std::int64_t best_id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const EncodedInstance& inst = at(i);
    const double h = BinaryEntropy(PredictProba(model, inst.x));
    if (h > best_h || (h == best_h && inst.id < best_id)) {
      best = i;
      best_h = h;
      best_id = inst.id;
    }
  }
  return best;
}

json ResponseToJson(const AnnotatorResponse& r) {
  json j = {{"label", r.label}, {"texts", r.texts}};
  if (r.agreement) j["agreement"] = *r.agreement;
  if (r.rating) j["rating"] = *r.rating;
  return j;
}

AnnotatorResponse ResponseFromJson(const json& j) {
  AnnotatorResponse r;
  r.label = j.at("label").get<int>();
  if (j.contains("agreement") && !j.at("agreement").is_null()) {
    r.agreement = j.at("agreement").get<bool>();
  }
  if (j.contains("rating") && !j.at("rating").is_null()) {
    r.rating = j.at("rating").get<int>();
  }
  r.texts = j.value("texts", std::vector<std::string>{});
  return r;
}

}  // namespace

std::string_view ToString(FeedbackMode m) {
  return m == FeedbackMode::kIncorporate ? "incorporate" : "record_only";
}

FeedbackMode ParseFeedbackMode(std::string_view s) {
  if (s == "incorporate") return FeedbackMode::kIncorporate;
  if (s == "record_only") return FeedbackMode::kRecordOnly;
  throw InvalidArgument("unknown feedback mode '" + std::string(s) + "'");
}

double BinaryEntropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("BinaryEntropy: p must lie in [0, 1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

std::int64_t SelectQuery(const LinearModel& model,
                         std::span<const EncodedInstance> pool) {
  if (pool.empty()) throw StateError("SelectQuery: empty pool");
  const auto i = ArgmaxEntropy(model, pool.size(),
                               [&](std::size_t k) -> const EncodedInstance& {
                                 return pool[k];
                               });
  return pool[i].id;
}

std::vector<InitialPair> GenerateInitialPairs(const DatasetSplit& split,
                                              int count, AccuracyWindow window,
                                              std::uint64_t seed,
                                              const TrainConfig& train,
                                              std::int64_t attempt_budget) {
  if (!(window.lo > 0.0 && window.hi < 1.0 && window.lo <= window.hi)) {
    throw InvalidArgument("accuracy window must lie inside (0, 1)");
  }
  if (count < 1) throw InvalidArgument("pair count must be >= 1");
  if (split.pool.size() < 2) throw InvalidArgument("pool too small for pairs");
  if (split.test.empty()) throw InvalidArgument("empty test set");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, split.pool.size() - 1);
  std::vector<InitialPair> pairs;
  std::int64_t attempts = 0;
  std::vector<TrainingExample> examples(2);
  while (static_cast<int>(pairs.size()) < count) {
    if (attempts >= attempt_budget) {
      std::ostringstream msg;
      msg << "found " << pairs.size() << " of " << count
          << " initial pairs after " << attempts << " attempts (acceptance rate "
          << static_cast<double>(pairs.size()) / static_cast<double>(attempts)
          << ")";
      throw StateError(msg.str());
    }
    ++attempts;
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    const auto& ia = split.pool[a];
    const auto& ib = split.pool[b];
    examples[0] = {ia.id, ia.x, ia.y, 1.0};
    examples[1] = {ib.id, ib.x, ib.y, 1.0};
    const LinearModel m = Train(examples, train);
    const double acc = Evaluate(m, split.test).accuracy;
    if (acc >= window.lo && acc <= window.hi) {
      pairs.push_back({{ia.id, ia.y}, {ib.id, ib.y}, acc});
    }
  }
  return pairs;
}

bool StoppingCheck(std::span<const CurvePoint> curve, int window,
                   double epsilon) {
  if (window < 2) throw InvalidArgument("stopping window must be >= 2");
  const auto w = static_cast<std::size_t>(window);
  if (curve.size() < w) return false;
  const std::size_t start = curve.size() - w;
  double best = curve[start].accuracy;
  for (std::size_t i = start; i < curve.size(); ++i) {
    best = std::max(best, curve[i].accuracy);
  }
  return best - curve[start].accuracy < epsilon;
}

std::optional<int> FirstStoppingPoint(std::span<const CurvePoint> curve,
                                      int window, double epsilon) {
  for (std::size_t len = static_cast<std::size_t>(std::max(window, 2));
       len <= curve.size(); ++len) {
    if (StoppingCheck(curve.first(len), window, epsilon)) {
      return curve[len - 1].queries_answered;
    }
  }
  return std::nullopt;
}

ALSession::ALSession(std::shared_ptr<const DatasetSplit> split,
                     std::shared_ptr<const FeatureSchema> schema,
                     std::vector<LabeledEntry> initial, SessionConfig config,
                     EventSink sink)
    : split_(std::move(split)),
      schema_(std::move(schema)),
      config_(config),
      sink_(std::move(sink)),
      labeled_(std::move(initial)) {
  if (!split_ || !schema_) throw InvalidArgument("session needs split and schema");
  if (labeled_.empty()) throw InvalidArgument("session needs initial labels");
  if (config_.queries < 0) throw InvalidArgument("queries must be >= 0");
  initial_count_ = labeled_.size();

  std::vector<bool> taken(split_->pool.size(), false);
  for (const auto& e : labeled_) {
    if (e.label != 0 && e.label != 1) throw InvalidArgument("label must be 0 or 1");
    const std::size_t idx = PoolIndexOf(e.id);
    if (taken[idx]) throw InvalidArgument("duplicate initial instance");
    taken[idx] = true;
  }
  pool_.reserve(split_->pool.size() - labeled_.size());
  for (std::size_t i = 0; i < split_->pool.size(); ++i) {
    if (!taken[i]) pool_.push_back(i);
  }

  Retrain();
  const Metrics m = Evaluate(model_, split_->test);
  curve_.push_back({0, m.accuracy, m.f1});

  json initial_json = json::array();
  for (const auto& e : labeled_) initial_json.push_back({{"id", e.id}, {"label", e.label}});
  Emit({{"type", "created"},
        {"condition", ToString(config_.condition)},
        {"stage", ToString(config_.stage)},
        {"seed", config_.seed},
        {"queries", config_.queries},
        {"lambda", config_.train.lambda},
        {"max_iterations", config_.train.max_iterations},
        {"gradient_tolerance", config_.train.gradient_tolerance},
        {"top_features", config_.top_features},
        {"feedback_mode", ToString(config_.feedback_mode)},
        {"counterexamples_per_removal", config_.counterexamples_per_removal},
        {"schema_hash", HexDigest(schema_->Fingerprint())},
        {"split_seed", split_->seed},
        {"initial", initial_json},
        {"accuracy", m.accuracy},
        {"f1", m.f1},
        {"model_digest", HexDigest(WeightDigest(model_))}});
}

void ALSession::Emit(json event) {
  events_.push_back(event);
  if (sink_) sink_(events_.back());
}

std::size_t ALSession::PoolIndexOf(std::int64_t id) const {
  const auto& pool = split_->pool;
  const auto it = std::lower_bound(
      pool.begin(), pool.end(), id,
      [](const EncodedInstance& inst, std::int64_t v) { return inst.id < v; });
  if (it == pool.end() || it->id != id) {
    throw InvalidArgument("instance " + std::to_string(id) + " is not in the pool");
  }
  return static_cast<std::size_t>(it - pool.begin());
}

const Eigen::VectorXd& ALSession::Features(std::int64_t id) const {
  return split_->pool[PoolIndexOf(id)].x;
}

std::vector<std::int64_t> ALSession::PoolIds() const {
  std::vector<std::int64_t> ids;
  ids.reserve(pool_.size());
  for (auto i : pool_) ids.push_back(split_->pool[i].id);
  return ids;
}

std::vector<TrainingExample> ALSession::TrainingSet() const {
  std::vector<TrainingExample> out;
  out.reserve(labeled_.size());
  for (const auto& e : labeled_) out.push_back({e.id, Features(e.id), e.label, 1.0});
  return out;
}

std::vector<FeedbackRecord> ALSession::AllFeedback() const {
  std::vector<FeedbackRecord> out;
  for (const auto& q : history_) {
    out.insert(out.end(), q.feedback.begin(), q.feedback.end());
  }
  return out;
}

void ALSession::Retrain() {
  const auto training = TrainingSet();
  const auto fingerprint = schema_->Fingerprint();
  if (config_.feedback_mode == FeedbackMode::kIncorporate) {
    const auto feedback = AllFeedback();
    if (!feedback.empty()) {
      const auto augmented = BuildFeedbackTrainingSet(
          training, feedback, split_->pool, *schema_,
          config_.counterexamples_per_removal, config_.seed);
      model_ = Train(augmented, config_.train, fingerprint);
      return;
    }
  }
  model_ = Train(training, config_.train, fingerprint);
}

bool ALSession::complete() const {
  if (config_.queries > 0 && answered() >= config_.queries) return true;
  return pool_.empty() && outstanding() == nullptr;
}

const QueryRecord* ALSession::outstanding() const {
  if (history_.empty() || history_.back().response) return nullptr;
  return &history_.back();
}

const QueryRecord& ALSession::IssueQuery(double now) {
  if (outstanding() != nullptr) throw StateError("a query is already outstanding");
  if (complete()) throw StateError("session is complete");
  if (pool_.empty()) throw StateError("pool exhausted");
  const auto pos = ArgmaxEntropy(model_, pool_.size(),
                                 [&](std::size_t k) -> const EncodedInstance& {
                                   return split_->pool[pool_[k]];
                                 });
  const EncodedInstance& inst = split_->pool[pool_[pos]];

  QueryRecord q;
  q.instance_id = inst.id;
  q.probability = PredictProba(model_, inst.x);
  q.issued_at = now;
  if (ShowsPrediction(config_.condition)) q.prediction = PredictLabel(model_, inst.x);
  if (ShowsExplanation(config_.condition)) {
    q.explanation = Explain(model_, *schema_, inst.x, config_.top_features);
  }
  history_.push_back(std::move(q));
  Emit({{"type", "query_issued"},
        {"index", history_.size() - 1},
        {"instance_id", inst.id},
        {"t", now},
        {"probability", history_.back().probability}});
  return history_.back();
}

const CurvePoint& ALSession::SubmitResponse(const AnnotatorResponse& response,
                                            std::vector<FeedbackRecord> feedback,
                                            double now) {
  if (outstanding() == nullptr) throw StateError("no outstanding query");
  if (response.label != 0 && response.label != 1) {
    throw InvalidArgument("label must be 0 or 1");
  }
  if (response.rating && (*response.rating < 1 || *response.rating > 5)) {
    throw InvalidArgument("rating must lie in 1..5");
  }
  QueryRecord& q = history_.back();
  const std::int64_t id = q.instance_id;

  std::vector<FeedbackRecord> records;
  records.push_back({id, now, LabelFeedback{response.label}});
  if (response.agreement) records.push_back({id, now, AgreementFeedback{*response.agreement}});
  if (response.rating) records.push_back({id, now, ExplanationRating{*response.rating}});
  for (auto& f : feedback) {
    ValidateFeedback(f, *schema_);
    const bool known =
        f.instance_id == id ||
        std::any_of(labeled_.begin(), labeled_.end(),
                    [&](const LabeledEntry& e) { return e.id == f.instance_id; });
    if (!known) {
      throw InvalidArgument("feedback references instance " +
                            std::to_string(f.instance_id) +
                            " outside the session history");
    }
    records.push_back(std::move(f));
  }

  json feedback_json = json::array();
  for (std::size_t i = 1 + (response.agreement ? 1 : 0) + (response.rating ? 1 : 0);
       i < records.size(); ++i) {
    feedback_json.push_back(FeedbackToJson(records[i]));
  }
  json event = {{"type", "response_received"},
                {"index", history_.size() - 1},
                {"instance_id", id},
                {"t", now},
                {"response", ResponseToJson(response)},
                {"feedback", feedback_json}};
  Emit(std::move(event));

  q.response = response;
  q.responded_at = now;
  q.feedback = std::move(records);
  labeled_.push_back({id, response.label});
  pool_.erase(std::find(pool_.begin(), pool_.end(), PoolIndexOf(id)));

  Retrain();
  const Metrics m = Evaluate(model_, split_->test);
  curve_.push_back({answered(), m.accuracy, m.f1});
  Emit({{"type", "retrained"},
        {"queries_answered", answered()},
        {"accuracy", m.accuracy},
        {"f1", m.f1},
        {"model_digest", HexDigest(WeightDigest(model_))}});
  return curve_.back();
}

const CurvePoint& ALSession::SubmitLabel(int label, double now) {
  AnnotatorResponse r;
  r.label = label;
  return SubmitResponse(r, {}, now);
}

ALSession ALSession::Replay(std::span<const json> events,
                           std::shared_ptr<const DatasetSplit> split,
                           std::shared_ptr<const FeatureSchema> schema,
                           EventSink sink) {
  if (events.empty() || events.front().value("type", "") != "created") {
    throw DataError("event log does not start with a created event");
  }
  // Derived events are checked against the log; those beyond its end are
  // forwarded to `sink`.
  std::size_t produced = 0;
  auto verifier = [&events, &produced, sink](const json& e) {
    const std::size_t k = produced++;
    if (k < events.size()) {
      if (events[k] != e) {
        throw DataError("event " + std::to_string(k) +
                        " diverges on replay: logged " + events[k].dump() +
                        ", replayed " + e.dump());
      }
    } else if (sink) {
      sink(e);
    }
  };

  try {
    const json& c = events.front();
    if (c.at("schema_hash").get<std::string>() != HexDigest(schema->Fingerprint())) {
      throw DataError("event log was written against a different schema");
    }
    if (c.at("split_seed").get<std::uint64_t>() != split->seed) {
      throw DataError("event log was written against a different split");
    }
    SessionConfig config;
    config.condition = ParseCondition(c.at("condition").get<std::string>());
    config.stage = ParseStage(c.at("stage").get<std::string>());
    config.seed = c.at("seed").get<std::uint64_t>();
    config.queries = c.at("queries").get<int>();
    config.train.lambda = c.at("lambda").get<double>();
    config.train.max_iterations = c.at("max_iterations").get<int>();
    config.train.gradient_tolerance = c.at("gradient_tolerance").get<double>();
    config.top_features = c.at("top_features").get<int>();
    config.feedback_mode = ParseFeedbackMode(c.at("feedback_mode").get<std::string>());
    config.counterexamples_per_removal = c.at("counterexamples_per_removal").get<int>();
    std::vector<LabeledEntry> initial;
    for (const auto& e : c.at("initial")) {
      initial.push_back({e.at("id").get<std::int64_t>(), e.at("label").get<int>()});
    }

    ALSession session(split, schema, std::move(initial), config, verifier);
    for (std::size_t k = 1; k < events.size(); ++k) {
      const json& e = events[k];
      const std::string type = e.at("type").get<std::string>();
      if (type == "query_issued") {
        if (produced != k) throw DataError("unexpected query_issued at event " + std::to_string(k));
        session.IssueQuery(e.at("t").get<double>());
      } else if (type == "response_received") {
        if (produced != k) throw DataError("unexpected response at event " + std::to_string(k));
        std::vector<FeedbackRecord> feedback;
        for (const auto& f : e.at("feedback")) feedback.push_back(FeedbackFromJson(f));
        session.SubmitResponse(ResponseFromJson(e.at("response")), std::move(feedback),
                               e.at("t").get<double>());
      } else if (type == "retrained") {
        // Produced by the preceding response and verified by the sink.
        if (produced <= k) throw DataError("retrained event without a response");
      } else {
        throw DataError("unknown event type '" + type + "'");
      }
    }
    // Replay is complete; later events flow straight to the caller's sink.
    session.sink_ = sink;
    return session;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed event log: ") + e.what());
  }
}

ALSession SimulateOracleRun(std::shared_ptr<const DatasetSplit> split,
                            std::shared_ptr<const FeatureSchema> schema,
                            const InitialPair& pair, int n,
                            const TrainConfig& train) {
  if (n < 0) throw InvalidArgument("query count must be >= 0");
  if (split->pool.size() <= static_cast<std::size_t>(n)) {
    throw StateError("pool of " + std::to_string(split->pool.size()) +
                     " cannot supply " + std::to_string(n) + " queries");
  }
  SessionConfig config;
  config.train = train;
  config.queries = n;
  ALSession session(split, std::move(schema), {pair.first, pair.second}, config);
  for (int i = 0; i < n; ++i) {
    const auto& q = session.IssueQuery(0.0);
    session.SubmitLabel(PoolGroundTruth(*split, q.instance_id));
  }
  return session;
}

LateStageSnapshot SimulateToLateStage(std::shared_ptr<const DatasetSplit> split,
                                      std::shared_ptr<const FeatureSchema> schema,
                                      const InitialPair& pair, int n,
                                      const TrainConfig& train) {
  ALSession run = SimulateOracleRun(std::move(split), std::move(schema), pair, n, train);
  return {run.model(), run.labeled(), run.curve()};
}

int PoolGroundTruth(const DatasetSplit& split, std::int64_t id) {
  const auto it = std::lower_bound(
      split.pool.begin(), split.pool.end(), id,
      [](const EncodedInstance& inst, std::int64_t v) { return inst.id < v; });
  if (it == split.pool.end() || it->id != id) {
    throw InvalidArgument("instance " + std::to_string(id) + " is not in the pool");
  }
  return it->y;
}

json CurvePointToJson(const CurvePoint& p) {
  return {{"queries_answered", p.queries_answered},
          {"accuracy", p.accuracy},
          {"f1", p.f1}};
}

json QueryRecordToJson(const QueryRecord& q) {
  json j = {{"instance_id", q.instance_id},
            {"probability", q.probability},
            {"issued_at", q.issued_at}};
  if (q.prediction) j["prediction"] = *q.prediction;
  if (q.explanation) j["explanation"] = ExplanationToJson(*q.explanation);
  if (q.response) {
    j["response"] = ResponseToJson(*q.response);
    j["responded_at"] = *q.responded_at;
    json fb = json::array();
    for (const auto& f : q.feedback) fb.push_back(FeedbackToJson(f));
    j["feedback"] = fb;
  }
  return j;
}

}  // namespace xal
