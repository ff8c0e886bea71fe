// Copyright 2026 The cmwb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CMWB_SERVICE_H_
#define CMWB_SERVICE_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace cmwb::service {

// Current time as an ISO 8601 UTC string.
using Clock = std::function<std::string()>;

std::string SystemClock();

struct ServiceOptions {
  std::filesystem::path data_dir;
  int workers = 2;
  Clock clock = SystemClock;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using Query = std::map<std::string, std::string>;

// Projects, corpus snapshots, analysis jobs, coding sessions and exports,
// persisted as a plain directory tree under the data directory. Jobs run on
// a bounded worker pool: FIFO per project, with a writer (import, dedup)
// running alone in its project and read-only jobs running side by side.
// Reopening a data directory marks interrupted jobs FAILED and requeues
// jobs that never started.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();

  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  // Handles one JSON-over-HTTP request. Safe to call concurrently.
  Response Handle(std::string_view method, std::string_view path,
                  const Query &query, std::string_view body);

  // Blocks until no job is queued or running and no background task is
  // pending.
  void WaitIdle();

  // While paused, queued jobs do not start. Running jobs are unaffected.
  void Pause();
  void Resume();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Serves `service` over HTTP until SIGINT or SIGTERM. Static files under
// `ui_dir`, when given, are mounted at /ui/. Returns a process exit code.
int ServeHttp(Service *service, const std::string &host, int port,
              const std::filesystem::path &ui_dir = {});

}  // namespace cmwb::service

#endif  // CMWB_SERVICE_H_
