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

#ifndef XAL_SERVICE_H_
#define XAL_SERVICE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "xal/al_engine.h"
#include "xal/errors.h"
#include "xal/event_log.h"
#include "xal/harness.h"

namespace xal {

struct ServiceConfig {
  std::string storage_root = "sessions";
  double min_seconds = 10.0;
  double lambda = 1.0;
  std::string host = "127.0.0.1";
  int port = 8080;
  // Responses between agreement summaries. Zero disables them.
  int agreement_every = 10;
};

// A request the service refuses. `status` is the HTTP status the transport
// should use; `code` is a stable machine-readable token.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message,
               std::optional<double> retry_after = std::nullopt)
      : Error(message), status_(status), code_(std::move(code)),
        retry_after_(retry_after) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  std::optional<double> retry_after() const { return retry_after_; }
  nlohmann::json ToJson() const;

 private:
  int status_;
  std::string code_;
  std::optional<double> retry_after_;
};

// Seconds on a clock that is comparable across process restarts.
using Clock = std::function<double()>;
double WallClockSeconds();

// Live annotation sessions backed by one append-only event log per session.
// Thread-safe: distinct sessions proceed concurrently, requests to one session
// are serialized.
class SessionService {
 public:
  // Replays every "*.jsonl" log under config.storage_root (created if absent).
  SessionService(std::shared_ptr<const Corpus> corpus, ServiceConfig config,
                 Clock clock = WallClockSeconds);
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  // Request: {condition, stage, seed?, queries?=20}.
  // Reply: {session_id, query}.
  nlohmann::json CreateSession(const nlohmann::json& request);

  // Request: {label, agreement?, rating?, texts?, instance_id?, feedback?}.
  // Reply: {session_id, accepted, curve_point, complete, query | summary,
  // agreement_percentage?}.
  nlohmann::json SubmitResponse(const std::string& id, const nlohmann::json& request);

  // The outstanding query payload, or the summary once complete.
  nlohmann::json GetQuery(const std::string& id);
  nlohmann::json GetState(const std::string& id);
  nlohmann::json Health() const;

  std::size_t session_count() const;
  const ServiceConfig& config() const { return config_; }

 private:
  struct Live;

  std::shared_ptr<Live> Find(const std::string& id) const;
  nlohmann::json QueryPayload(const std::string& id, const ALSession& s) const;
  nlohmann::json Summary(const ALSession& s) const;
  std::optional<double> AgreementPercentage(const ALSession& s) const;
  std::string NewId();
  void LoadAll();

  std::shared_ptr<const Corpus> corpus_;
  ServiceConfig config_;
  Clock clock_;
  TrainConfig train_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::uint64_t id_state_;
};

// HTTP transport over SessionService.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds host:port (port 0 picks a free one) and returns the bound port,
  // or -1 on failure.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); call after Bind.
  bool Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace xal

#endif  // XAL_SERVICE_H_
