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

#include <cmath>
#include <string>

#include <httplib.h>

namespace xal {
namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `fn`, mapping service, engine and parse errors onto HTTP statuses.
template <typename Fn>
void Handle(httplib::Response& res, Fn&& fn) {
  try {
    Reply(res, 200, fn());
  } catch (const ServiceError& e) {
    if (e.retry_after()) {
      res.set_header("Retry-After",
                     std::to_string(static_cast<long>(std::ceil(*e.retry_after()))));
    }
    Reply(res, e.status(), e.ToJson());
  } catch (const json::exception& e) {
    Reply(res, 400, {{"error", "invalid_request"}, {"message", e.what()}});
  } catch (const InvalidArgument& e) {
    Reply(res, 400, {{"error", "invalid_request"}, {"message", e.what()}});
  } catch (const StateError& e) {
    Reply(res, 409, {{"error", "conflict"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    Reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
  }
}

json Body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(SessionService& s) : service(s) {}
  SessionService& service;
  httplib::Server server;
};

HttpServer::HttpServer(SessionService& service)
    : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;
  srv.Get("/healthz", [&svc](const httplib::Request&, httplib::Response& res) {
    Handle(res, [&] { return svc.Health(); });
  });
  srv.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&] { return svc.CreateSession(Body(req)); });
  });
  srv.Get(R"(/sessions/([0-9a-zA-Z]+))",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            Handle(res, [&] { return svc.GetState(req.matches[1]); });
          });
  srv.Get(R"(/sessions/([0-9a-zA-Z]+)/query)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            Handle(res, [&] { return svc.GetQuery(req.matches[1]); });
          });
  srv.Post(R"(/sessions/([0-9a-zA-Z]+)/response)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             Handle(res, [&] { return svc.SubmitResponse(req.matches[1], Body(req)); });
           });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::Serve() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace xal
