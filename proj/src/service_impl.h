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

#ifndef CMWB_SRC_SERVICE_IMPL_H_
#define CMWB_SRC_SERVICE_IMPL_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cmwb/classify.h"
#include "cmwb/corpus.h"
#include "cmwb/error.h"
#include "cmwb/service.h"
#include "cmwb/topics.h"
#include "cmwb/workflow.h"
#include "json.hpp"

namespace cmwb::service {

// The request is well formed but the target is in the wrong state.
class Conflict : public Error {
 public:
  using Error::Error;
};

// Malformed request body or query.
class BadRequest : public Error {
 public:
  using Error::Error;
};

struct JobRecord {
  std::string id;
  std::string project;
  workflow::JobKind kind = workflow::JobKind::kCooc;
  std::string status = "QUEUED";
  double progress = 0.0;
  nlohmann::json params;
  std::string preset;
  std::optional<int> snapshot;         // corpus version read
  std::optional<int> output_snapshot;  // version written by writer jobs
  std::string error;
  std::string submitted;
  std::string started;
  std::string finished;
  std::uint64_t seq = 0;  // global submission order

  nlohmann::json ToJson() const;
  static JobRecord FromJson(const nlohmann::json &j);
};

struct JobState {
  JobRecord record;  // guarded by Impl::mu
  nlohmann::json request;
  std::atomic<double> progress{0.0};
  std::atomic<bool> cancel{false};
};

struct ProjectState {
  std::string id;
  std::string name;
  std::string created;
  int next_job = 1;
  std::vector<int> snapshots;  // ascending
  std::vector<std::shared_ptr<JobState>> jobs;  // submission order
  int running = 0;
  bool writer_running = false;
};

struct SessionState {
  std::mutex mu;
  std::string id;
  std::string project;
  int snapshot = 0;
  std::string created;
  workflow::Preprocessing preprocessing;
  std::vector<std::string> candidates;
  std::optional<CodingSession> session;
  DocTermMatrix dtm;
  std::optional<NaiveBayesModel> model;
  int model_version = 0;
  LabelMap trained_labels;
  bool retrain_scheduled = false;
};

struct Service::Impl {
  explicit Impl(ServiceOptions options);
  ~Impl();

  // Paths.
  std::filesystem::path ProjectDir(const std::string &p) const;
  std::filesystem::path SnapshotDir(const std::string &p, int v) const;
  std::filesystem::path JobFile(const std::string &p,
                                const std::string &j) const;
  std::filesystem::path RequestFile(const std::string &p,
                                    const std::string &j) const;
  std::filesystem::path ResultDir(const std::string &p,
                                  const std::string &j) const;
  std::filesystem::path SessionFile(const std::string &s) const;

  // Projects and snapshots.
  nlohmann::json CreateProject(const nlohmann::json &body);
  nlohmann::json ProjectJson(const std::string &p);
  ProjectState &FindProject(const std::string &p);  // requires mu
  std::shared_ptr<const Corpus> LoadSnapshot(const std::string &p, int v);
  int LatestSnapshot(const std::string &p);  // throws Conflict when none
  nlohmann::json GetDocument(const std::string &p, const std::string &doc,
                             const Query &query);

  // Jobs.
  nlohmann::json SubmitJob(const std::string &p, workflow::JobKind kind,
                           const nlohmann::json &params);
  nlohmann::json ValidateJob(const std::string &p, workflow::JobKind kind,
                             const nlohmann::json &params);
  std::string StorePreset(const std::string &p, workflow::JobKind kind,
                          const nlohmann::json &params);
  nlohmann::json JobJson(const std::string &p, const std::string &j);
  nlohmann::json CancelJob(const std::string &p, const std::string &j);
  std::shared_ptr<JobState> FindJob(const std::string &p,
                                    const std::string &j);  // requires mu
  void SaveJob(const JobState &job);                         // requires mu
  std::filesystem::path DoneResultDir(const std::string &p,
                                      const std::string &j,
                                      std::optional<workflow::JobKind> kind);
  nlohmann::json ResultJson(const std::string &p, const std::string &j);
  Response ResultFile(const std::string &p, const std::string &j,
                      const std::string &name);

  // Scheduling.
  void WorkerLoop();
  std::shared_ptr<JobState> PickRunnable();  // requires mu
  void RunJob(const std::shared_ptr<JobState> &job);
  workflow::Output Execute(const std::shared_ptr<JobState> &job,
                           std::optional<Corpus> *new_snapshot);
  workflow::Output ExecuteExport(const JobRecord &record,
                                 const nlohmann::json &request);
  void PostTask(std::function<void()> task);
  void WaitIdle();

  // Models.
  std::shared_ptr<TopicModel> LoadModelLocked(const std::string &p,
                                              const std::string &m);
  nlohmann::json ModelJson(const std::string &p, const std::string &m,
                           const Query &query);
  nlohmann::json LabelTopic(const std::string &p, const std::string &m,
                            int topic, const nlohmann::json &body);
  nlohmann::json HighlightJson(const std::string &p, const std::string &m,
                               int topic, const std::string &doc,
                               const Query &query);

  // Sessions.
  nlohmann::json CreateSession(const std::string &p,
                               const nlohmann::json &body);
  std::shared_ptr<SessionState> FindSession(const std::string &s);
  nlohmann::json SessionJson(const std::string &s);
  nlohmann::json RecordLabel(const std::string &s, const nlohmann::json &body);
  nlohmann::json NextQuery(const std::string &s);
  void SaveSession(const SessionState &state);  // requires state.mu
  void PrepareSession(SessionState *state);     // builds the matrix
  void ScheduleRetrain(const std::shared_ptr<SessionState> &state);
  void Retrain(const std::shared_ptr<SessionState> &state);

  // Startup.
  void Recover();
  void LoadSessionFromDisk(const std::filesystem::path &file);

  ServiceOptions options;
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, ProjectState> projects;
  std::map<std::string, std::shared_ptr<SessionState>> sessions;
  std::deque<std::shared_ptr<JobState>> queue;
  std::deque<std::function<void()>> tasks;
  int busy = 0;  // running jobs plus running tasks
  int next_project = 1;
  int next_session = 1;
  std::uint64_t next_seq = 1;
  bool paused = false;
  bool stopping = false;
  std::vector<std::thread> workers;

  std::mutex cache_mu;
  std::map<std::string, std::shared_ptr<const Corpus>> corpus_cache;
  std::mutex model_mu;
  std::map<std::string, std::shared_ptr<TopicModel>> model_cache;
};

// Routes one request to the matching Impl operation.
Response Route(Service::Impl *impl, std::string_view method,
               std::string_view path, const Query &query,
               std::string_view body);

}  // namespace cmwb::service

#endif  // CMWB_SRC_SERVICE_IMPL_H_
