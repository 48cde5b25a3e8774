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

#ifndef ULFSYNTH_QCSERVE_SERVER_H_
#define ULFSYNTH_QCSERVE_SERVER_H_

#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "ulfsynth/qcserve/service.h"

namespace httplib {
class Server;
}

namespace ulfsynth::qcserve {

// HTTP front end for a QcService:
//   GET  /api/subjects
//   GET  /api/subjects/{id}/slice        8-bit PNG
//   GET  /api/subjects/{id}/slice.json   overlay run-length sidecar
//   POST /api/subjects/{id}/rating
//   GET  /api/ratings.csv
// plus static files from `static_dir` at "/".
class Server {
 public:
  Server(QcService& service, std::optional<std::string> static_dir = std::nullopt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  // Returns the bound port; throws IoError when binding fails.
  int Start(const std::string& host, int port);
  // Blocks until Stop() is called from elsewhere.
  void Wait();
  void Stop();

 private:
  QcService& service_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace ulfsynth::qcserve

#endif  // ULFSYNTH_QCSERVE_SERVER_H_
