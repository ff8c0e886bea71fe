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

#include <pthread.h>
#include <signal.h>

#include <iostream>
#include <thread>

#include "cmwb/service.h"

// Clients that omit a JSON content type get curl's form default; accept
// bodies of any size either way.
#define CPPHTTPLIB_FORM_URL_ENCODED_PAYLOAD_MAX_LENGTH (256u << 20)
#include "httplib.h"

namespace cmwb::service {

int ServeHttp(Service *service, const std::string &host, int port,
              const std::filesystem::path &ui_dir) {
  // Route termination signals to a dedicated thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  if (!ui_dir.empty() && !server.set_mount_point("/ui", ui_dir.string())) {
    std::cerr << "ui directory " << ui_dir << " does not exist\n";
    return 1;
  }
  auto handler = [service](const httplib::Request &req,
                           httplib::Response &res) {
    // Only the URL query string; form-encoded bodies are not parameters.
    httplib::Params params;
    if (auto q = req.target.find('?'); q != std::string::npos) {
      httplib::detail::parse_query_text(req.target.substr(q + 1), params);
    }
    Query query;
    for (const auto &[key, value] : params) query[key] = value;
    const Response r = service->Handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(R"(/projects.*|/sessions.*)", handler);
  server.Post(R"(/projects.*|/sessions.*)", handler);

  std::thread watcher([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  if (!server.bind_to_port(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    return 1;
  }
  std::cerr << "listening on http://" << host << ":" << port << "\n";
  server.listen_after_bind();
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  return 0;
}

}  // namespace cmwb::service
