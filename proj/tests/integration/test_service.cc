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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>

#include "support/fixtures.h"
#include "xal/explainer.h"
#include "xal/service.h"

#include <httplib.h>

namespace xal {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<const Corpus> AdultCorpus() {
  static const auto corpus = std::make_shared<const Corpus>(
      Corpus::Load(testing::AdultDataPath(), DatasetDecl::AdultIncome(), 0));
  return corpus;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            (std::string("xal_service_") +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    now_ = 1000.0;
  }
  void TearDown() override { fs::remove_all(root_); }

  std::unique_ptr<SessionService> Start(double min_seconds = 10.0) {
    ServiceConfig c;
    c.storage_root = root_.string();
    c.min_seconds = min_seconds;
    return std::make_unique<SessionService>(AdultCorpus(), c, [this] { return now_.load(); });
  }

  json Respond(SessionService& s, const std::string& id, int label, json extra = json::object()) {
    extra["label"] = label;
    return s.SubmitResponse(id, extra);
  }

  static int ServiceStatus(const std::function<void()>& fn, std::string* code = nullptr,
                           std::optional<double>* retry = nullptr) {
    try {
      fn();
    } catch (const ServiceError& e) {
      if (code) *code = e.code();
      if (retry) *retry = e.retry_after();
      return e.status();
    }
    return 200;
  }

  fs::path root_;
  std::atomic<double> now_{0.0};
};

TEST_F(ServiceTest, PayloadsFollowTheCondition) {
  auto svc = Start();
  const json al = svc->CreateSession({{"condition", "AL"}, {"stage", "early"}, {"seed", 1}});
  const json& q = al["query"];
  EXPECT_FALSE(q.contains("prediction"));
  EXPECT_FALSE(q.contains("explanation"));
  EXPECT_EQ(q["attributes"].size(), 10u);
  EXPECT_EQ(q["progress"]["answered"], 0);
  EXPECT_EQ(q["progress"]["total"], 20);

  const json cl = svc->CreateSession({{"condition", "CL"}, {"stage", "early"}, {"seed", 1}});
  EXPECT_TRUE(cl["query"].contains("prediction"));
  EXPECT_FALSE(cl["query"].contains("explanation"));

  const json xal = svc->CreateSession({{"condition", "XAL"}, {"stage", "early"}, {"seed", 1}});
  ASSERT_TRUE(xal["query"].contains("explanation"));
  const Explanation e = ExplanationFromJson(xal["query"]["explanation"]);
  EXPECT_TRUE(IsComplete(e));
  EXPECT_EQ(e.contributions.size(), 5u);
  EXPECT_EQ(e.predicted_label, xal["query"]["prediction"]["label"].get<int>());
  EXPECT_EQ(al["query"]["instance_id"], xal["query"]["instance_id"]);

  const json state = svc->GetState(al["session_id"]);
  EXPECT_EQ(state["history"].size(), 1u);
  EXPECT_FALSE(state["history"][0].contains("response"));
  EXPECT_EQ(state["initial_count"], 2);
  EXPECT_EQ(svc->session_count(), 3u);
}

TEST_F(ServiceTest, SameSeedSameFirstQueryAcrossRestarts) {
  std::int64_t first = 0;
  {
    auto svc = Start();
    first = svc->CreateSession({{"condition", "XAL"}, {"seed", 42}})["query"]["instance_id"];
  }
  fs::remove_all(root_);
  auto svc = Start();
  EXPECT_EQ(svc->CreateSession({{"condition", "XAL"}, {"seed", 42}})["query"]["instance_id"], first);
}

TEST_F(ServiceTest, MinimumTimeIsEnforced) {
  auto svc = Start(10.0);
  const std::string id = svc->CreateSession({{"condition", "AL"}, {"seed", 3}})["session_id"];
  now_ = now_ + 3.0;
  std::string code;
  std::optional<double> retry;
  EXPECT_EQ(ServiceStatus([&] { Respond(*svc, id, 1); }, &code, &retry), 425);
  EXPECT_EQ(code, "too_early");
  ASSERT_TRUE(retry.has_value());
  EXPECT_NEAR(*retry, 7.0, 1e-9);
  now_ = now_ + 7.0;
  EXPECT_EQ(ServiceStatus([&] { Respond(*svc, id, 1); }), 200);
}

TEST_F(ServiceTest, AgreementCadenceAndCompletionSummary) {
  auto svc = Start(0.0);
  const json created = svc->CreateSession({{"condition", "CL"}, {"seed", 5}});
  const std::string id = created["session_id"];
  json reply;
  for (int k = 1; k <= 20; ++k) {
    const json q = svc->GetQuery(id)["query"];
    const int predicted = q["prediction"]["label"];
    reply = Respond(*svc, id, k % 3 == 0 ? 1 - predicted : predicted,
                    {{"agreement", k % 3 != 0}, {"instance_id", q["instance_id"]}});
    EXPECT_EQ(reply.contains("agreement_percentage"), k % 10 == 0) << k;
    EXPECT_EQ(reply["complete"], k == 20);
    EXPECT_EQ(reply["curve_point"]["queries_answered"], k);
  }
  ASSERT_TRUE(reply.contains("summary"));
  const json& summary = reply["summary"];
  EXPECT_EQ(summary["curve"].size(), 20u);
  EXPECT_EQ(summary["final_accuracy"], summary["curve"].back()["accuracy"]);
  EXPECT_TRUE(summary.contains("final_f1"));
  const double pct = summary["agreement_percentage"];
  EXPECT_GE(pct, 0.0);
  EXPECT_LE(pct, 100.0);

  std::string code;
  EXPECT_EQ(ServiceStatus([&] { Respond(*svc, id, 1); }, &code), 409);
  EXPECT_EQ(code, "session_complete");
  EXPECT_TRUE(svc->GetQuery(id)["complete"].get<bool>());
}

TEST_F(ServiceTest, RejectsInvalidRequests) {
  auto svc = Start(0.0);
  EXPECT_EQ(ServiceStatus([&] { svc->CreateSession({{"condition", "BL"}}); }), 400);
  EXPECT_EQ(ServiceStatus([&] { svc->CreateSession({{"condition", "AL"}, {"stage", "mid"}}); }), 400);
  EXPECT_EQ(ServiceStatus([&] { svc->CreateSession({{"condition", "AL"}, {"queries", 0}}); }), 400);
  EXPECT_EQ(ServiceStatus([&] { svc->GetState("0123456789abcdef"); }), 404);
  const std::string cl = svc->CreateSession({{"condition", "CL"}, {"seed", 1}})["session_id"];
  EXPECT_EQ(ServiceStatus([&] { svc->SubmitResponse(cl, json::object()); }), 400);
  EXPECT_EQ(ServiceStatus([&] { Respond(*svc, cl, 3); }), 400);
  EXPECT_EQ(ServiceStatus([&] { Respond(*svc, cl, 1, {{"rating", 4}}); }), 400);
  EXPECT_EQ(ServiceStatus([&] { Respond(*svc, cl, 1, {{"instance_id", -5}}); }), 409);
  EXPECT_EQ(ServiceStatus([&] {
              Respond(*svc, cl, 1, {{"feedback", {{{"kind", "feature_adjustment"},
                                                   {"feature", "shoe-size"},
                                                   {"action", "remove"}}}}});
            }),
            400);
  EXPECT_EQ(svc->GetState(cl)["answered"], 0);
}

TEST_F(ServiceTest, ConcurrentSubmissionsAcceptExactlyOne) {
  auto svc = Start(0.0);
  const json created = svc->CreateSession({{"condition", "XAL"}, {"seed", 8}});
  const std::string id = created["session_id"];
  const std::int64_t instance = created["query"]["instance_id"];
  std::atomic<int> accepted{0}, duplicates{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      std::string code;
      const int status = ServiceStatus(
          [&] { Respond(*svc, id, 1, {{"instance_id", instance}, {"rating", 3}}); }, &code);
      if (status == 200) ++accepted;
      if (status == 409 && code == "duplicate") ++duplicates;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(accepted.load(), 1);
  EXPECT_EQ(duplicates.load(), 7);
  EXPECT_EQ(svc->GetState(id)["answered"], 1);
}

TEST_F(ServiceTest, RestartRestoresIdenticalState) {
  std::string id;
  json before, query_before;
  {
    auto svc = Start(0.0);
    id = svc->CreateSession({{"condition", "XAL"}, {"seed", 13}})["session_id"];
    for (int k = 0; k < 5; ++k) {
      Respond(*svc, id, k % 2, {{"rating", 2 + k % 3}, {"texts", {"because"}},
                               {"feedback", {{{"kind", "feature_adjustment"},
                                               {"feature", "age"},
                                               {"action", "decrease"}}}}});
    }
    before = svc->GetState(id);
    query_before = svc->GetQuery(id);
  }
  auto svc = Start(0.0);
  EXPECT_EQ(svc->GetState(id), before);
  EXPECT_EQ(svc->GetQuery(id), query_before);

  // The curve in the state equals a replay of the raw log.
  const auto events = ReadEventLog((root_ / (id + ".jsonl")).string());
  const Corpus& c = *AdultCorpus();
  const ALSession replayed = ALSession::Replay(events, c.split, c.schema);
  json curve = json::array();
  for (const auto& p : replayed.curve()) curve.push_back(CurvePointToJson(p));
  EXPECT_EQ(before["curve"], curve);
}

TEST_F(ServiceTest, TornTailAndMissingQueryAreRecovered) {
  std::string id;
  json query_before;
  {
    auto svc = Start(0.0);
    id = svc->CreateSession({{"condition", "AL"}, {"seed", 21}})["session_id"];
    Respond(*svc, id, 1);
    Respond(*svc, id, 0);
    query_before = svc->GetQuery(id);
  }
  const fs::path log = root_ / (id + ".jsonl");
  // Drop the last query_issued, then leave a partial line behind.
  auto events = ReadEventLog(log.string());
  ASSERT_EQ(events.back()["type"], "query_issued");
  events.pop_back();
  {
    std::ofstream out(log, std::ios::trunc);
    for (const auto& e : events) out << e.dump() << "\n";
    out << "{\"type\":\"query_is";
  }
  auto svc = Start(0.0);
  const json q = svc->GetQuery(id);
  EXPECT_EQ(q["query"]["instance_id"], query_before["query"]["instance_id"]);
  Respond(*svc, id, 1);
  EXPECT_EQ(ReadEventLog(log.string()).back()["type"], "query_issued");
}

TEST_F(ServiceTest, LateStageStartsFromTheSimulatedSnapshot) {
  auto svc = Start(0.0);
  const json created = svc->CreateSession({{"condition", "AL"}, {"stage", "late"}, {"seed", 2}});
  const json state = svc->GetState(created["session_id"]);
  EXPECT_EQ(state["initial_count"], 2 + kLateStageQueries);
  EXPECT_GT(state["curve"][0]["accuracy"].get<double>(), 0.7);
}

TEST_F(ServiceTest, HttpEndpoints) {
  auto svc = Start(10.0);
  HttpServer server(*svc);
  const int port = server.Bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread serving([&] { server.Serve(); });
  httplib::Client client("127.0.0.1", port);
  for (int i = 0; i < 100 && !client.Get("/healthz"); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["status"], "ok");

  auto created = client.Post("/sessions", R"({"condition":"XAL","stage":"early","seed":4})",
                             "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 200) << created->body;
  const std::string id = json::parse(created->body)["session_id"];

  auto query = client.Get("/sessions/" + id + "/query");
  ASSERT_TRUE(query);
  EXPECT_EQ(query->status, 200);
  EXPECT_TRUE(json::parse(query->body)["query"].contains("explanation"));

  now_ = now_ + 3.0;
  auto early = client.Post("/sessions/" + id + "/response", R"({"label":1,"rating":4})",
                           "application/json");
  ASSERT_TRUE(early);
  EXPECT_EQ(early->status, 425);
  EXPECT_EQ(early->get_header_value("Retry-After"), "7");
  EXPECT_NEAR(json::parse(early->body)["retry_after"].get<double>(), 7.0, 1e-9);

  now_ = now_ + 7.0;
  auto ok = client.Post("/sessions/" + id + "/response", R"({"label":1,"rating":4})",
                        "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200) << ok->body;

  auto state = client.Get("/sessions/" + id);
  ASSERT_TRUE(state);
  EXPECT_EQ(json::parse(state->body)["answered"], 1);

  auto missing = client.Get("/sessions/ffffffffffffffff");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto malformed = client.Post("/sessions", "{oops", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);

  server.Stop();
  serving.join();
}

}  // namespace
}  // namespace xal
