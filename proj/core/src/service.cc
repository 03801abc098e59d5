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

#include "xal/service.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "xal/explainer.h"
#include "xal/feedback.h"
#include "xal/linear_model.h"

namespace xal {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

bool ValidId(const std::string& id) {
  return id.size() == 16 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

ServiceError BadRequest(const std::string& message) {
  return ServiceError(400, "invalid_request", message);
}

template <typename T>
std::optional<T> Optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw BadRequest(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

json ServiceError::ToJson() const {
  json j = {{"error", code_}, {"message", what()}};
  if (retry_after_) j["retry_after"] = *retry_after_;
  return j;
}

double WallClockSeconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

struct SessionService::Live {
  std::mutex mu;
  std::unique_ptr<EventLogWriter> writer;
  std::unique_ptr<ALSession> session;

  EventSink Sink() {
    EventLogWriter* w = writer.get();
    return [w](const json& e) { w->Append(e); };
  }
};

SessionService::SessionService(std::shared_ptr<const Corpus> corpus,
                               ServiceConfig config, Clock clock)
    : corpus_(std::move(corpus)), config_(std::move(config)), clock_(std::move(clock)) {
  if (!corpus_) throw InvalidArgument("service requires a corpus");
  if (!(config_.min_seconds >= 0.0)) throw InvalidArgument("min_seconds must be >= 0");
  if (!(config_.lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (config_.agreement_every < 0) throw InvalidArgument("agreement_every must be >= 0");
  train_.lambda = config_.lambda;
  std::random_device rd;
  id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
              static_cast<std::uint64_t>(clock_() * 1e6);
  fs::create_directories(config_.storage_root);
  LoadAll();
}

SessionService::~SessionService() = default;

void SessionService::LoadAll() {
  std::vector<fs::path> logs;
  for (const auto& entry : fs::directory_iterator(config_.storage_root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl" &&
        ValidId(entry.path().stem().string())) {
      logs.push_back(entry.path());
    }
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    const std::string id = path.stem().string();
    try {
      if (TruncateTornTail(path.string()) > 0) {
        std::cerr << "session " << id << ": dropped torn final event\n";
      }
      const auto events = ReadEventLog(path.string());
      if (events.empty()) {
        std::cerr << "session " << id << ": empty event log, skipped\n";
        continue;
      }
      auto live = std::make_shared<Live>();
      live->writer = std::make_unique<EventLogWriter>(path.string());
      live->session = std::make_unique<ALSession>(ALSession::Replay(
          events, corpus_->split, corpus_->schema, live->Sink()));
      ALSession& s = *live->session;
      if (!s.complete() && s.outstanding() == nullptr) s.IssueQuery(clock_());
      sessions_.emplace(id, std::move(live));
    } catch (const std::exception& e) {
      throw Error("cannot restore session log '" + path.string() + "': " + e.what());
    }
  }
}

std::string SessionService::NewId() {
  for (;;) {
    std::uint64_t z = (id_state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(z));
    std::string id = buf;
    if (!sessions_.count(id) && !fs::exists(fs::path(config_.storage_root) / (id + ".jsonl"))) {
      return id;
    }
  }
}

std::shared_ptr<SessionService::Live> SessionService::Find(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw ServiceError(404, "unknown_session", "no session '" + id + "'");
  }
  return it->second;
}

json SessionService::CreateSession(const json& request) {
  if (!request.is_object()) throw BadRequest("request body must be an object");
  SessionConfig sc;
  try {
    sc.condition = ParseCondition(request.at("condition").get<std::string>());
    sc.stage = ParseStage(request.value("stage", std::string("early")));
  } catch (const json::exception&) {
    throw BadRequest("'condition' (AL, CL or XAL) and 'stage' (early or late) are required strings");
  } catch (const InvalidArgument& e) {
    throw BadRequest(e.what());
  }
  const auto seed = Optional<std::uint64_t>(request, "seed");
  const int queries = Optional<int>(request, "queries").value_or(20);
  if (queries < 1) throw BadRequest("'queries' must be >= 1");
  sc.queries = queries;
  sc.train = train_;
  if (seed) {
    sc.seed = *seed;
  } else {
    std::random_device rd;
    sc.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  const InitialPair pair =
      GenerateInitialPairs(*corpus_->split, 1, AccuracyWindow{}, sc.seed, train_)[0];
  std::vector<LabeledEntry> initial = {pair.first, pair.second};
  if (sc.stage == Stage::kLate) {
    initial = SimulateToLateStage(corpus_->split, corpus_->schema, pair,
                                  kLateStageQueries, train_)
                  .labeled;
  }

  std::unique_lock lock(mu_);
  const std::string id = NewId();
  auto live = std::make_shared<Live>();
  live->writer = std::make_unique<EventLogWriter>(
      (fs::path(config_.storage_root) / (id + ".jsonl")).string());
  live->session = std::make_unique<ALSession>(corpus_->split, corpus_->schema,
                                              std::move(initial), sc, live->Sink());
  live->session->IssueQuery(clock_());
  sessions_.emplace(id, live);
  lock.unlock();

  std::lock_guard<std::mutex> guard(live->mu);
  return {{"session_id", id}, {"seed", sc.seed}, {"query", QueryPayload(id, *live->session)}};
}

json SessionService::SubmitResponse(const std::string& id, const json& request) {
  if (!request.is_object()) throw BadRequest("request body must be an object");
  auto live = Find(id);
  std::lock_guard<std::mutex> guard(live->mu);
  ALSession& s = *live->session;
  if (s.complete()) throw ServiceError(409, "session_complete", "session is complete");
  const QueryRecord* q = s.outstanding();
  if (q == nullptr) throw ServiceError(409, "no_outstanding_query", "no outstanding query");

  const auto instance = Optional<std::int64_t>(request, "instance_id");
  if (instance && *instance != q->instance_id) {
    throw ServiceError(409, "duplicate",
                       "instance " + std::to_string(*instance) +
                           " is not the outstanding query");
  }
  const double now = clock_();
  const double elapsed = now - q->issued_at;
  if (elapsed < config_.min_seconds) {
    throw ServiceError(425, "too_early", "minimum time per query not reached",
                       config_.min_seconds - elapsed);
  }

  AnnotatorResponse response;
  const auto label = Optional<int>(request, "label");
  if (!label || (*label != 0 && *label != 1)) throw BadRequest("'label' must be 0 or 1");
  response.label = *label;
  response.agreement = Optional<bool>(request, "agreement");
  response.rating = Optional<int>(request, "rating");
  if (response.agreement && !ShowsPrediction(s.condition())) {
    throw BadRequest("'agreement' requires a condition that shows predictions");
  }
  if (response.rating && !ShowsExplanation(s.condition())) {
    throw BadRequest("'rating' requires the XAL condition");
  }
  if (request.contains("texts") && request.at("texts").is_string()) {
    response.texts = {request.at("texts").get<std::string>()};
  } else {
    response.texts = Optional<std::vector<std::string>>(request, "texts").value_or(
        std::vector<std::string>{});
  }
  std::vector<FeedbackRecord> feedback;
  if (request.contains("feedback")) {
    if (!request.at("feedback").is_array()) throw BadRequest("'feedback' must be an array");
    for (json f : request.at("feedback")) {
      if (f.is_object() && !f.contains("instance_id")) f["instance_id"] = q->instance_id;
      if (f.is_object() && !f.contains("timestamp")) f["timestamp"] = now;
      try {
        feedback.push_back(FeedbackFromJson(f));
      } catch (const std::exception& e) {
        throw BadRequest(e.what());
      }
    }
  }

  const int index = static_cast<int>(s.history().size()) - 1;
  const std::int64_t answered_id = q->instance_id;
  CurvePoint point;
  try {
    point = s.SubmitResponse(response, std::move(feedback), now);
  } catch (const InvalidArgument& e) {
    throw BadRequest(e.what());
  }

  json reply = {{"session_id", id},
                {"accepted", {{"index", index}, {"instance_id", answered_id}}},
                {"curve_point", CurvePointToJson(point)},
                {"complete", s.complete()}};
  if (config_.agreement_every > 0 && s.answered() % config_.agreement_every == 0) {
    if (auto pct = AgreementPercentage(s)) reply["agreement_percentage"] = *pct;
  }
  if (s.complete()) {
    reply["summary"] = Summary(s);
  } else {
    s.IssueQuery(now);
    reply["query"] = QueryPayload(id, s);
  }
  return reply;
}

json SessionService::GetQuery(const std::string& id) {
  auto live = Find(id);
  std::lock_guard<std::mutex> guard(live->mu);
  const ALSession& s = *live->session;
  if (s.complete()) return {{"session_id", id}, {"complete", true}, {"summary", Summary(s)}};
  return {{"session_id", id}, {"complete", false}, {"query", QueryPayload(id, s)}};
}

json SessionService::GetState(const std::string& id) {
  auto live = Find(id);
  std::lock_guard<std::mutex> guard(live->mu);
  const ALSession& s = *live->session;
  json history = json::array(), curve = json::array(), labeled = json::array();
  for (const auto& q : s.history()) history.push_back(QueryRecordToJson(q));
  for (const auto& p : s.curve()) curve.push_back(CurvePointToJson(p));
  for (const auto& e : s.labeled()) labeled.push_back({{"id", e.id}, {"label", e.label}});
  return {{"session_id", id},
          {"condition", ToString(s.condition())},
          {"stage", ToString(s.stage())},
          {"seed", s.config().seed},
          {"queries", s.config().queries},
          {"answered", s.answered()},
          {"complete", s.complete()},
          {"initial_count", s.initial_count()},
          {"history", history},
          {"curve", curve},
          {"labeled", labeled},
          {"model", ModelToJson(s.model())},
          {"event_count", s.events().size()}};
}

json SessionService::Health() const {
  std::shared_lock lock(mu_);
  return {{"status", "ok"},
          {"sessions", sessions_.size()},
          {"dataset", corpus_->content_hash},
          {"pool", corpus_->split->pool.size()},
          {"test", corpus_->split->test.size()}};
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

json SessionService::QueryPayload(const std::string& id, const ALSession& s) const {
  const QueryRecord* q = s.outstanding();
  if (q == nullptr) throw StateError("no outstanding query");
  const FeatureSchema& schema = *corpus_->schema;
  const Eigen::VectorXd& x = s.Features(q->instance_id);
  json attributes = json::array();
  for (std::size_t i = 0; i < schema.feature_count(); ++i) {
    attributes.push_back({{"name", schema.feature(i).name},
                          {"value", schema.DisplayValue(i, x)}});
  }
  json payload = {{"session_id", id},
                  {"index", s.history().size() - 1},
                  {"instance_id", q->instance_id},
                  {"condition", ToString(s.condition())},
                  {"stage", ToString(s.stage())},
                  {"attributes", attributes},
                  {"progress", {{"answered", s.answered()}, {"total", s.config().queries}}},
                  {"issued_at", q->issued_at},
                  {"min_seconds", config_.min_seconds}};
  if (q->prediction) {
    payload["prediction"] = {
        {"label", *q->prediction},
        {"label_text", *q->prediction == 1 ? corpus_->decl.positive_label
                                            : corpus_->decl.negative_label}};
  }
  if (q->explanation) payload["explanation"] = ExplanationToJson(*q->explanation);
  return payload;
}

std::optional<double> SessionService::AgreementPercentage(const ALSession& s) const {
  int answered = 0, matching = 0;
  for (const auto& q : s.history()) {
    if (!q.response) continue;
    ++answered;
    matching += q.response->label == PoolGroundTruth(*corpus_->split, q.instance_id);
  }
  if (answered == 0) return std::nullopt;
  return 100.0 * matching / answered;
}

json SessionService::Summary(const ALSession& s) const {
  const auto& curve = s.curve();
  json points = json::array();
  for (std::size_t i = 1; i < curve.size(); ++i) points.push_back(CurvePointToJson(curve[i]));
  json j = {{"queries_answered", s.answered()},
            {"initial", {{"accuracy", curve.front().accuracy}, {"f1", curve.front().f1}}},
            {"final_accuracy", curve.back().accuracy},
            {"final_f1", curve.back().f1},
            {"curve", points}};
  if (auto pct = AgreementPercentage(s)) j["agreement_percentage"] = *pct;
  return j;
}

}  // namespace xal
