// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ulfsynth/qcserve/server.h"

#include "httplib.h"
#include "ulfsynth/util/errors.h"

namespace ulfsynth::qcserve {

namespace {

void Send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

std::map<std::string, std::string> Query(const httplib::Request& req) {
  // Repeated keys: the last one wins.
  std::map<std::string, std::string> q;
  for (const auto& [k, v] : req.params) q[k] = v;
  return q;
}

}  // namespace

Server::Server(QcService& service, std::optional<std::string> static_dir)
    : service_(service), http_(std::make_unique<httplib::Server>()) {
  httplib::Server& s = *http_;
  s.Get("/api/subjects", [this](const httplib::Request&, httplib::Response& res) {
    Send(res, service_.ListSubjects());
  });
  s.Get(R"(/api/subjects/([^/]+)/slice)", [this](const httplib::Request& req, httplib::Response& res) {
    Send(res, service_.GetSlicePng(req.matches[1], Query(req)));
  });
  s.Get(R"(/api/subjects/([^/]+)/slice\.json)",
        [this](const httplib::Request& req, httplib::Response& res) {
          Send(res, service_.GetSliceJson(req.matches[1], Query(req)));
        });
  s.Post(R"(/api/subjects/([^/]+)/rating)", [this](const httplib::Request& req, httplib::Response& res) {
    Send(res, service_.PostRating(req.matches[1], req.body));
  });
  s.Get("/api/ratings.csv", [this](const httplib::Request&, httplib::Response& res) {
    Send(res, service_.RatingsCsv());
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    Send(res, ErrorResponse(500, what));
  });
  if (static_dir && !s.set_mount_point("/", *static_dir)) {
    throw IoError("cannot serve static files from '" + *static_dir + "'");
  }
}

Server::~Server() { Stop(); }

int Server::Start(const std::string& host, int port) {
  const int bound = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return bound;
}

void Server::Wait() {
  if (thread_.joinable()) thread_.join();
}

void Server::Stop() {
  http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace ulfsynth::qcserve
