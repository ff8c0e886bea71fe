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

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <limits>
#include <set>
#include <utility>

#include "cmwb/fileutil.h"
#include "cmwb/interchange.h"
#include "service_impl.h"

namespace cmwb::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using workflow::JobKind;

// Numeric part of an id such as "p3" or "j12"; nullopt when malformed.
std::optional<int> Ordinal(const std::string &id, char prefix) {
  if (id.size() < 2 || id[0] != prefix) return std::nullopt;
  int n = 0;
  auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
  if (ec != std::errc() || ptr != id.data() + id.size() || n < 1) {
    return std::nullopt;
  }
  return n;
}

std::optional<int> ParseInt(const std::string &s) {
  int n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return n;
}

std::string Fnv64Hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json ReadJson(const fs::path &path) { return json::parse(ReadFile(path)); }

void WriteJson(const fs::path &path, const json &j) {
  WriteFileAtomic(path, j.dump(2) + "\n");
}

// Writes `files` into a fresh directory and renames it into place, so a
// directory that exists is always complete.
void WriteDirAtomic(const fs::path &dir, const workflow::Files &files) {
  const fs::path tmp = dir.parent_path() / (".tmp-" + dir.filename().string());
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  for (const auto &[name, data] : files) WriteFileAtomic(tmp / name, data);
  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

void RemoveTempDirs(const fs::path &dir) {
  if (!fs::is_directory(dir)) return;
  for (const auto &e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().starts_with(".tmp-")) {
      fs::remove_all(e.path());
    }
  }
}

std::optional<std::string> OptString(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

// Export requests: {format, model, result, session, name, seed}.
struct ExportRequest {
  std::string format;
  std::string model;
  std::string result;
  std::string session;
  std::string name;
  std::uint64_t seed = 1;

  static ExportRequest FromJson(const json &j) {
    static const std::set<std::string> kKeys = {"format", "model",  "result",
                                                "session", "name", "seed"};
    std::vector<FieldError> errors;
    if (!j.is_object()) throw ValidationError("params", "must be an object");
    for (const auto &[key, value] : j.items()) {
      if (!kKeys.contains(key)) errors.push_back({"params." + key,
                                                  "unknown field"});
    }
    ExportRequest r;
    auto str = [&](const char *key, std::string *out) {
      auto it = j.find(key);
      if (it == j.end()) return;
      if (!it->is_string()) {
        errors.push_back({std::string("params.") + key, "must be a string"});
      } else {
        *out = it->get<std::string>();
      }
    };
    str("format", &r.format);
    str("model", &r.model);
    str("result", &r.result);
    str("session", &r.session);
    str("name", &r.name);
    if (auto it = j.find("seed"); it != j.end()) {
      if (it->is_number_unsigned() ||
          (it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
        r.seed = it->get<std::uint64_t>();
      } else {
        errors.push_back({"params.seed", "must be a non-negative integer"});
      }
    }
    static const std::set<std::string> kFormats = {"corpus_csv", "qdpx",
                                                   "topics", "cooc", "labels"};
    if (!kFormats.contains(r.format)) {
      errors.push_back({"params.format",
                        "must be corpus_csv, qdpx, topics, cooc or labels"});
    } else if (r.format == "topics" && r.model.empty()) {
      errors.push_back({"params.model", "required for topics exports"});
    } else if (r.format == "cooc" && r.result.empty()) {
      errors.push_back({"params.result", "required for cooc exports"});
    } else if ((r.format == "labels" || r.format == "qdpx") &&
               r.session.empty()) {
      errors.push_back({"params.session",
                        "required for " + r.format + " exports"});
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return r;
  }

  json ToJson() const {
    json j = {{"format", format}, {"seed", seed}};
    if (!model.empty()) j["model"] = model;
    if (!result.empty()) j["result"] = result;
    if (!session.empty()) j["session"] = session;
    if (!name.empty()) j["name"] = name;
    return j;
  }
};

json SpanJson(const HighlightSpan &s) {
  return {{"start", s.span.start},
          {"end", s.span.end},
          {"topic", s.topic},
          {"weight", s.weight}};
}

}  // namespace

std::string SystemClock() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json JobRecord::ToJson() const {
  json j = {{"id", id},
            {"project", project},
            {"kind", workflow::JobKindName(kind)},
            {"status", status},
            {"progress", progress},
            {"params", params},
            {"preset", preset},
            {"snapshot", snapshot ? json(*snapshot) : json(nullptr)},
            {"output_snapshot",
             output_snapshot ? json(*output_snapshot) : json(nullptr)},
            {"result", status == "DONE" ? json(id) : json(nullptr)},
            {"error", error.empty() ? json(nullptr) : json(error)},
            {"submitted", submitted},
            {"started", started.empty() ? json(nullptr) : json(started)},
            {"finished", finished.empty() ? json(nullptr) : json(finished)},
            {"seq", seq}};
  return j;
}

JobRecord JobRecord::FromJson(const json &j) {
  JobRecord r;
  r.id = j.at("id").get<std::string>();
  r.project = j.at("project").get<std::string>();
  auto kind = workflow::ParseJobKind(j.at("kind").get<std::string>());
  if (!kind) throw Error("job " + r.id + " has an unknown kind");
  r.kind = *kind;
  r.status = j.at("status").get<std::string>();
  r.progress = j.at("progress").get<double>();
  r.params = j.at("params");
  r.preset = j.at("preset").get<std::string>();
  if (!j.at("snapshot").is_null()) r.snapshot = j["snapshot"].get<int>();
  if (!j.at("output_snapshot").is_null()) {
    r.output_snapshot = j["output_snapshot"].get<int>();
  }
  r.error = OptString(j, "error").value_or("");
  r.submitted = j.at("submitted").get<std::string>();
  r.started = OptString(j, "started").value_or("");
  r.finished = OptString(j, "finished").value_or("");
  r.seq = j.at("seq").get<std::uint64_t>();
  return r;
}

Service::Impl::Impl(ServiceOptions opts) : options(std::move(opts)) {
  if (!options.clock) options.clock = SystemClock;
  fs::create_directories(options.data_dir / "projects");
  fs::create_directories(options.data_dir / "sessions");
  Recover();
  const int n = std::max(1, options.workers);
  for (int i = 0; i < n; ++i) workers.emplace_back([this] { WorkerLoop(); });
}

Service::Impl::~Impl() {
  {
    std::lock_guard lk(mu);
    stopping = true;
  }
  cv.notify_all();
  for (auto &t : workers) t.join();
}

fs::path Service::Impl::ProjectDir(const std::string &p) const {
  return options.data_dir / "projects" / p;
}
fs::path Service::Impl::SnapshotDir(const std::string &p, int v) const {
  return ProjectDir(p) / "snapshots" / std::to_string(v);
}
fs::path Service::Impl::JobFile(const std::string &p,
                                const std::string &j) const {
  return ProjectDir(p) / "jobs" / (j + ".json");
}
fs::path Service::Impl::RequestFile(const std::string &p,
                                    const std::string &j) const {
  return ProjectDir(p) / "jobs" / (j + ".request.json");
}
fs::path Service::Impl::ResultDir(const std::string &p,
                                  const std::string &j) const {
  return ProjectDir(p) / "results" / j;
}
fs::path Service::Impl::SessionFile(const std::string &s) const {
  return options.data_dir / "sessions" / s / "session.json";
}

// ---------------------------------------------------------------------------
// Projects and snapshots

json Service::Impl::CreateProject(const json &body) {
  if (!body.is_object()) throw ValidationError("body", "must be an object");
  std::vector<FieldError> errors;
  for (const auto &[key, value] : body.items()) {
    if (key != "name") errors.push_back({key, "unknown field"});
  }
  std::string name;
  auto it = body.find("name");
  if (it == body.end()) {
    errors.push_back({"name", "required"});
  } else if (!it->is_string() || it->get<std::string>().empty()) {
    errors.push_back({"name", "must be a non-empty string"});
  } else {
    name = it->get<std::string>();
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  std::lock_guard lk(mu);
  ProjectState ps;
  ps.id = "p" + std::to_string(next_project++);
  ps.name = name;
  ps.created = options.clock();
  fs::create_directories(ProjectDir(ps.id) / "snapshots");
  WriteJson(ProjectDir(ps.id) / "project.json",
            {{"id", ps.id}, {"name", ps.name}, {"created", ps.created}});
  const json out = {{"id", ps.id}, {"name", ps.name}, {"created", ps.created}};
  projects.emplace(ps.id, std::move(ps));
  return out;
}

ProjectState &Service::Impl::FindProject(const std::string &p) {
  auto it = projects.find(p);
  if (it == projects.end()) throw NotFound("project " + p + " not found");
  return it->second;
}

json Service::Impl::ProjectJson(const std::string &p) {
  std::lock_guard lk(mu);
  ProjectState &ps = FindProject(p);
  json snapshots = json::array();
  for (int v : ps.snapshots) {
    snapshots.push_back(ReadJson(SnapshotDir(p, v) / "snapshot.json"));
  }
  json presets = json::array();
  if (fs::is_directory(ProjectDir(p) / "presets")) {
    std::vector<std::string> names;
    for (const auto &e : fs::directory_iterator(ProjectDir(p) / "presets")) {
      names.push_back(e.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    presets = names;
  }
  json jobs = json::array();
  for (const auto &job : ps.jobs) {
    jobs.push_back({{"id", job->record.id},
                    {"kind", workflow::JobKindName(job->record.kind)},
                    {"status", job->record.status}});
  }
  json session_ids = json::array();
  std::vector<std::pair<int, std::string>> ordered;
  for (const auto &[id, s] : sessions) {
    if (s->project == p) ordered.emplace_back(*Ordinal(id, 's'), id);
  }
  std::sort(ordered.begin(), ordered.end());
  for (const auto &[n, id] : ordered) session_ids.push_back(id);
  return {{"id", ps.id},
          {"name", ps.name},
          {"created", ps.created},
          {"snapshots", snapshots},
          {"latest_snapshot",
           ps.snapshots.empty() ? json(nullptr) : json(ps.snapshots.back())},
          {"presets", presets},
          {"jobs", jobs},
          {"sessions", session_ids}};
}

int Service::Impl::LatestSnapshot(const std::string &p) {
  ProjectState &ps = FindProject(p);
  if (ps.snapshots.empty()) {
    throw Conflict("project " + p + " has no corpus; import documents first");
  }
  return ps.snapshots.back();
}

std::shared_ptr<const Corpus> Service::Impl::LoadSnapshot(const std::string &p,
                                                          int v) {
  const std::string key = p + "/" + std::to_string(v);
  std::lock_guard lk(cache_mu);
  if (auto it = corpus_cache.find(key); it != corpus_cache.end()) {
    return it->second;
  }
  const fs::path dir = SnapshotDir(p, v);
  if (!fs::is_directory(dir)) {
    throw NotFound("snapshot " + std::to_string(v) + " of project " + p +
                   " not found");
  }
  auto corpus = std::make_shared<const Corpus>(LoadCorpus(dir));
  corpus_cache.emplace(key, corpus);
  return corpus;
}

json Service::Impl::GetDocument(const std::string &p, const std::string &doc,
                                const Query &query) {
  int v = 0;
  {
    std::lock_guard lk(mu);
    ProjectState &ps = FindProject(p);
    if (auto it = query.find("snapshot"); it != query.end()) {
      auto n = ParseInt(it->second);
      if (!n) throw ValidationError("snapshot", "must be an integer");
      if (!std::binary_search(ps.snapshots.begin(), ps.snapshots.end(), *n)) {
        throw NotFound("snapshot " + it->second + " of project " + p +
                       " not found");
      }
      v = *n;
    } else {
      if (ps.snapshots.empty()) {
        throw NotFound("project " + p + " has no documents");
      }
      v = ps.snapshots.back();
    }
  }
  const auto corpus = LoadSnapshot(p, v);
  const Document *d = corpus->Find(doc);
  if (!d) throw NotFound("document " + doc + " not found");
  json j = workflow::DocumentJson(*d);
  j["snapshot"] = v;
  return j;
}

// ---------------------------------------------------------------------------
// Jobs

json Service::Impl::ValidateJob(const std::string &p, JobKind kind,
                                const json &params) {
  const std::string prefix = "params.";
  switch (kind) {
    case JobKind::kImport:
      return workflow::ImportRequest::FromJson(params, prefix).ToJson();
    case JobKind::kDedup:
      return workflow::DedupRequest::FromJson(params, prefix).ToJson();
    case JobKind::kCooc:
      return workflow::CoocRequest::FromJson(params, prefix).ToJson();
    case JobKind::kLda:
      return workflow::LdaRequest::FromJson(params, prefix).ToJson();
    case JobKind::kEval:
      return workflow::EvalRequest::FromJson(params, prefix).ToJson();
    case JobKind::kSimulate:
      return workflow::SimulateRequest::FromJson(params, prefix).ToJson();
    case JobKind::kExport: {
      const ExportRequest r = ExportRequest::FromJson(params);
      std::vector<FieldError> errors;
      std::lock_guard lk(mu);
      FindProject(p);
      auto check_job = [&](const std::string &id, JobKind want,
                           const char *field) {
        auto job = FindJob(p, id);
        if (job->record.kind != want) {
          errors.push_back({std::string("params.") + field,
                            id + " is not a " +
                                std::string(workflow::JobKindName(want)) +
                                " job"});
        }
      };
      try {
        if (!r.model.empty()) check_job(r.model, JobKind::kLda, "model");
        if (!r.result.empty()) check_job(r.result, JobKind::kCooc, "result");
      } catch (const NotFound &e) {
        errors.push_back({"params", e.what()});
      }
      if (!r.session.empty()) {
        auto it = sessions.find(r.session);
        if (it == sessions.end() || it->second->project != p) {
          errors.push_back({"params.session",
                            "session " + r.session + " not found in " + p});
        }
      }
      if (!errors.empty()) throw ValidationError(std::move(errors));
      return r.ToJson();
    }
  }
  return params;
}

std::string Service::Impl::StorePreset(const std::string &p, JobKind kind,
                                       const json &params) {
  const json preset = {{"kind", workflow::JobKindName(kind)},
                       {"params", params}};
  const std::string id = "ps" + Fnv64Hex(preset.dump());
  const fs::path file = ProjectDir(p) / "presets" / (id + ".json");
  if (!fs::exists(file)) {
    json stored = preset;
    stored["id"] = id;
    WriteJson(file, stored);
  }
  return id;
}

json Service::Impl::SubmitJob(const std::string &p, JobKind kind,
                              const json &params) {
  {
    std::lock_guard lk(mu);
    FindProject(p);
  }
  const json normalized = ValidateJob(p, kind, params);
  std::lock_guard lk(mu);
  ProjectState &ps = FindProject(p);
  auto job = std::make_shared<JobState>();
  JobRecord &r = job->record;
  r.id = "j" + std::to_string(ps.next_job++);
  r.project = p;
  r.kind = kind;
  r.params = normalized;
  r.preset = StorePreset(p, kind, normalized);
  r.submitted = options.clock();
  r.seq = next_seq++;
  job->request = params;
  WriteJson(RequestFile(p, r.id), params);
  SaveJob(*job);
  ps.jobs.push_back(job);
  queue.push_back(job);
  cv.notify_all();
  return {{"id", r.id}, {"kind", workflow::JobKindName(kind)},
          {"status", r.status}};
}

std::shared_ptr<JobState> Service::Impl::FindJob(const std::string &p,
                                                 const std::string &j) {
  ProjectState &ps = FindProject(p);
  for (const auto &job : ps.jobs) {
    if (job->record.id == j) return job;
  }
  throw NotFound("job " + j + " not found in project " + p);
}

void Service::Impl::SaveJob(const JobState &job) {
  WriteJson(JobFile(job.record.project, job.record.id), job.record.ToJson());
}

json Service::Impl::JobJson(const std::string &p, const std::string &j) {
  std::lock_guard lk(mu);
  auto job = FindJob(p, j);
  JobRecord r = job->record;
  if (r.status == "RUNNING") r.progress = job->progress.load();
  json out = r.ToJson();
  out["cancel_requested"] = job->cancel.load();
  return out;
}

json Service::Impl::CancelJob(const std::string &p, const std::string &j) {
  std::lock_guard lk(mu);
  auto job = FindJob(p, j);
  JobRecord &r = job->record;
  if (r.status == "QUEUED") {
    queue.erase(std::remove(queue.begin(), queue.end(), job), queue.end());
    r.status = "CANCELLED";
    r.finished = options.clock();
    SaveJob(*job);
    cv.notify_all();
  } else if (r.status == "RUNNING") {
    job->cancel = true;
  } else {
    throw Conflict("job " + j + " is already " + r.status);
  }
  json out = r.ToJson();
  out["cancel_requested"] = true;
  return out;
}

fs::path Service::Impl::DoneResultDir(const std::string &p,
                                      const std::string &j,
                                      std::optional<JobKind> kind) {
  std::lock_guard lk(mu);
  auto job = FindJob(p, j);
  if (kind && job->record.kind != *kind) {
    throw NotFound(j + " is not a " +
                   std::string(workflow::JobKindName(*kind)) + " job");
  }
  if (job->record.status != "DONE") {
    throw Conflict("job " + j + " is " + job->record.status + ", not DONE");
  }
  return ResultDir(p, j);
}

json Service::Impl::ResultJson(const std::string &p, const std::string &j) {
  return ReadJson(DoneResultDir(p, j, std::nullopt) / "result.json");
}

Response Service::Impl::ResultFile(const std::string &p, const std::string &j,
                                   const std::string &name) {
  const fs::path dir = DoneResultDir(p, j, std::nullopt);
  const json result = ReadJson(dir / "result.json");
  const auto &files = result.at("files");
  if (std::find(files.begin(), files.end(), name) == files.end()) {
    throw NotFound("result " + j + " has no file " + name);
  }
  Response r;
  r.body = ReadFile(dir / name);
  const std::string ext = fs::path(name).extension().string();
  if (ext == ".csv") {
    r.content_type = "text/csv; charset=utf-8";
  } else if (ext == ".json") {
    r.content_type = "application/json";
  } else if (ext == ".qdpx") {
    r.content_type = "application/zip";
  } else {
    r.content_type = "application/octet-stream";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scheduling

std::shared_ptr<JobState> Service::Impl::PickRunnable() {
  if (paused) return nullptr;
  std::set<std::string> blocked;
  for (auto it = queue.begin(); it != queue.end(); ++it) {
    const auto &job = *it;
    const std::string &p = job->record.project;
    if (blocked.contains(p)) continue;
    const ProjectState &ps = projects.at(p);
    const bool ok = workflow::IsWriter(job->record.kind)
                        ? ps.running == 0
                        : !ps.writer_running;
    if (ok) {
      auto picked = job;
      queue.erase(it);
      return picked;
    }
    blocked.insert(p);
  }
  return nullptr;
}

void Service::Impl::WorkerLoop() {
  std::unique_lock lk(mu);
  for (;;) {
    if (stopping) return;
    if (!tasks.empty()) {
      auto task = std::move(tasks.front());
      tasks.pop_front();
      ++busy;
      lk.unlock();
      try {
        task();
      } catch (const std::exception &) {
        // Background tasks only refresh derived state; a failure leaves the
        // previous state in place.
      }
      lk.lock();
      --busy;
      cv.notify_all();
      continue;
    }
    auto job = PickRunnable();
    if (!job) {
      cv.wait(lk);
      continue;
    }
    JobRecord &r = job->record;
    ProjectState &ps = projects.at(r.project);
    const bool writer = workflow::IsWriter(r.kind);
    ++ps.running;
    if (writer) ps.writer_running = true;
    r.status = "RUNNING";
    r.started = options.clock();
    if (!ps.snapshots.empty()) r.snapshot = ps.snapshots.back();
    SaveJob(*job);
    ++busy;
    lk.unlock();
    RunJob(job);
    lk.lock();
    --busy;
    --ps.running;
    if (writer) ps.writer_running = false;
    cv.notify_all();
  }
}

void Service::Impl::RunJob(const std::shared_ptr<JobState> &job) {
  JobRecord record;
  {
    std::lock_guard lk(mu);
    record = job->record;
  }
  std::optional<Corpus> new_snapshot;
  workflow::Output out;
  std::string error;
  bool cancelled = false;
  try {
    out = Execute(job, &new_snapshot);
    cancelled = job->cancel.load();
  } catch (const Cancelled &) {
    cancelled = true;
  } catch (const std::exception &e) {
    error = e.what();
  }
  std::optional<int> written;
  if (!cancelled && error.empty()) {
    try {
      if (new_snapshot) {
        int v;
        {
          std::lock_guard lk(mu);
          const auto &snaps = projects.at(record.project).snapshots;
          v = snaps.empty() ? 1 : snaps.back() + 1;
        }
        const fs::path dir = SnapshotDir(record.project, v);
        const fs::path tmp =
            dir.parent_path() / (".tmp-" + dir.filename().string());
        fs::remove_all(tmp);
        SaveCorpus(*new_snapshot, tmp);
        WriteJson(tmp / "snapshot.json",
                  {{"version", v},
                   {"job", record.id},
                   {"created", options.clock()},
                   {"documents", new_snapshot->documents.size()}});
        fs::rename(tmp, dir);
        written = v;
      }
      workflow::Files files = out.files;
      json names = json::array();
      for (const auto &[name, data] : out.files) names.push_back(name);
      files["result.json"] =
          json{{"job", record.id},
               {"kind", workflow::JobKindName(record.kind)},
               {"snapshot",
                record.snapshot ? json(*record.snapshot) : json(nullptr)},
               {"output_snapshot", written ? json(*written) : json(nullptr)},
               {"preset", record.preset},
               {"summary", out.summary},
               {"files", names}}
              .dump(2) +
          "\n";
      WriteDirAtomic(ResultDir(record.project, record.id), files);
    } catch (const std::exception &e) {
      error = e.what();
    }
  }
  std::lock_guard lk(mu);
  JobRecord &r = job->record;
  r.finished = options.clock();
  if (cancelled) {
    r.status = "CANCELLED";
    r.progress = job->progress.load();
  } else if (!error.empty()) {
    r.status = "FAILED";
    r.error = error;
    r.progress = job->progress.load();
  } else {
    r.status = "DONE";
    r.progress = 1.0;
    r.output_snapshot = written;
    if (written) projects.at(r.project).snapshots.push_back(*written);
  }
  SaveJob(*job);
}

workflow::Output Service::Impl::Execute(const std::shared_ptr<JobState> &job,
                                        std::optional<Corpus> *new_snapshot) {
  JobRecord record;
  {
    std::lock_guard lk(mu);
    record = job->record;
  }
  const json &request = job->request;
  const std::string &p = record.project;
  auto corpus = [&]() -> std::shared_ptr<const Corpus> {
    if (!record.snapshot) {
      throw Error("project " + p + " has no corpus; import documents first");
    }
    return LoadSnapshot(p, *record.snapshot);
  };
  auto progress = [job](double f) { job->progress = f; };
  auto cancelled = [job] { return job->cancel.load(); };
  switch (record.kind) {
    case JobKind::kImport: {
      const Corpus base = record.snapshot ? *corpus() : Corpus{};
      auto out = workflow::RunImport(
          base, workflow::ImportRequest::FromJson(request, "params."));
      *new_snapshot = std::move(out.corpus);
      return out.output;
    }
    case JobKind::kDedup: {
      auto out = workflow::RunDedup(
          *corpus(), workflow::DedupRequest::FromJson(request, "params."));
      *new_snapshot = std::move(out.corpus);
      return out.output;
    }
    case JobKind::kCooc:
      return workflow::RunCooc(
          *corpus(), workflow::CoocRequest::FromJson(request, "params."));
    case JobKind::kLda:
      return workflow::RunLda(
          *corpus(), workflow::LdaRequest::FromJson(request, "params."),
          progress, cancelled);
    case JobKind::kEval:
      return workflow::RunEval(
          *corpus(), workflow::EvalRequest::FromJson(request, "params."));
    case JobKind::kSimulate:
      return workflow::RunSimulate(
          *corpus(), workflow::SimulateRequest::FromJson(request, "params."));
    case JobKind::kExport:
      return ExecuteExport(record, request);
  }
  throw Error("unsupported job kind");
}

workflow::Output Service::Impl::ExecuteExport(const JobRecord &record,
                                              const json &request) {
  const ExportRequest r = ExportRequest::FromJson(request);
  const std::string &p = record.project;
  workflow::Output out;
  if (r.format == "corpus_csv") {
    if (!record.snapshot) throw Error("project " + p + " has no corpus");
    out.files["corpus.csv"] = CorpusCsv(*LoadSnapshot(p, *record.snapshot));
  } else if (r.format == "topics") {
    const fs::path dir = DoneResultDir(p, r.model, JobKind::kLda);
    out.files["theta.csv"] = ReadFile(dir / "theta.csv");
    out.files["phi.csv"] = ReadFile(dir / "phi.csv");
  } else if (r.format == "cooc") {
    const fs::path dir = DoneResultDir(p, r.result, JobKind::kCooc);
    out.files["pairs.csv"] = ReadFile(dir / "pairs.csv");
  } else {
    auto state = FindSession(r.session);
    std::lock_guard lk(state->mu);
    if (r.format == "labels") {
      out.files["labels.csv"] = state->session->LabelsCsv();
    } else {
      const auto corpus = LoadSnapshot(state->project, state->snapshot);
      std::string name = r.name;
      if (name.empty()) {
        std::lock_guard plk(mu);
        name = FindProject(p).name;
      }
      const QdpxProject project =
          ProjectFromLabels(name, *corpus, state->session->codebook(),
                            state->session->Labels(), r.seed);
      out.files["project.qdpx"] = QdpxArchive(project);
    }
  }
  json names = json::array();
  for (const auto &[name, data] : out.files) names.push_back(name);
  out.summary = {{"format", r.format}, {"files", names}};
  return out;
}

void Service::Impl::PostTask(std::function<void()> task) {
  std::lock_guard lk(mu);
  tasks.push_back(std::move(task));
  cv.notify_all();
}

void Service::Impl::WaitIdle() {
  std::unique_lock lk(mu);
  cv.wait(lk, [&] {
    return tasks.empty() && busy == 0 && (queue.empty() || paused);
  });
}

// ---------------------------------------------------------------------------
// Models

std::shared_ptr<TopicModel> Service::Impl::LoadModelLocked(
    const std::string &p, const std::string &m) {
  const fs::path dir = DoneResultDir(p, m, JobKind::kLda);
  const std::string key = p + "/" + m;
  if (auto it = model_cache.find(key); it != model_cache.end()) {
    return it->second;
  }
  auto model = std::make_shared<TopicModel>(LoadModel(dir));
  model_cache.emplace(key, model);
  return model;
}

json Service::Impl::ModelJson(const std::string &p, const std::string &m,
                              const Query &query) {
  int n = 10;
  double lambda = 1.0;
  std::vector<FieldError> errors;
  if (auto it = query.find("n"); it != query.end()) {
    auto v = ParseInt(it->second);
    if (!v || *v < 1) {
      errors.push_back({"n", "must be a positive integer"});
    } else {
      n = *v;
    }
  }
  if (auto it = query.find("lambda"); it != query.end()) {
    try {
      std::size_t used = 0;
      lambda = std::stod(it->second, &used);
      if (used != it->second.size() || lambda < 0.0 || lambda > 1.0) {
        throw std::invalid_argument("");
      }
    } catch (const std::exception &) {
      errors.push_back({"lambda", "must be a number in [0, 1]"});
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  std::lock_guard lk(model_mu);
  auto model = LoadModelLocked(p, m);
  json topics = json::array();
  for (int k = 0; k < model->num_topics(); ++k) {
    json words = json::array();
    for (const auto &w : TopWords(*model, k, n, lambda)) {
      words.push_back({{"term", w.term}, {"relevance", w.relevance}});
    }
    auto label = model->labels.active.find(k);
    topics.push_back(
        {{"topic", k},
         {"label", label == model->labels.active.end() ? json(nullptr)
                                                       : json(label->second.label)},
         {"top_words", words}});
  }
  return {{"id", m},
          {"k", model->num_topics()},
          {"num_docs", model->num_docs()},
          {"vocab_size", model->vocab_size()},
          {"config", model->config.ToJson()},
          {"params", model->params.ToJson()},
          {"topics", topics},
          {"labels", model->labels.ToJson()}};
}

json Service::Impl::LabelTopic(const std::string &p, const std::string &m,
                               int topic, const json &body) {
  if (!body.is_object()) throw ValidationError("body", "must be an object");
  std::vector<FieldError> errors;
  for (const auto &[key, value] : body.items()) {
    if (key != "label" && key != "author") {
      errors.push_back({key, "unknown field"});
    }
  }
  std::string label;
  std::string author;
  if (auto it = body.find("label");
      it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
    errors.push_back({"label", "required non-empty string"});
  } else {
    label = it->get<std::string>();
  }
  if (auto it = body.find("author"); it != body.end()) {
    if (!it->is_string()) {
      errors.push_back({"author", "must be a string"});
    } else {
      author = it->get<std::string>();
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  std::lock_guard lk(model_mu);
  auto model = LoadModelLocked(p, m);
  if (topic < 0 || topic >= model->num_topics()) {
    throw NotFound("topic " + std::to_string(topic) + " not found in " + m);
  }
  const TopicLabel l =
      cmwb::LabelTopic(model.get(), topic, label, author, options.clock());
  WriteFileAtomic(ResultDir(p, m) / "labels.json",
                  model->labels.ToJson().dump(2) + "\n");
  return {{"topic", l.topic},
          {"label", l.label},
          {"author", l.author},
          {"timestamp", l.timestamp}};
}

json Service::Impl::HighlightJson(const std::string &p, const std::string &m,
                                  int topic, const std::string &doc,
                                  const Query &query) {
  double min_weight = 0.0;
  if (auto it = query.find("min_weight"); it != query.end()) {
    try {
      std::size_t used = 0;
      min_weight = std::stod(it->second, &used);
      if (used != it->second.size() || min_weight < 0.0 || min_weight > 1.0) {
        throw std::invalid_argument("");
      }
    } catch (const std::exception &) {
      throw ValidationError("min_weight", "must be a number in [0, 1]");
    }
  }
  std::lock_guard lk(model_mu);
  auto model = LoadModelLocked(p, m);
  if (topic < 0 || topic >= model->num_topics()) {
    throw NotFound("topic " + std::to_string(topic) + " not found in " + m);
  }
  int snapshot = 0;
  {
    std::lock_guard plk(mu);
    snapshot = FindJob(p, m)->record.snapshot.value_or(0);
  }
  const auto corpus = LoadSnapshot(p, snapshot);
  const Document *d = corpus->Find(doc);
  if (!d) throw NotFound("document " + doc + " not found");
  const Vocabulary vocab = RestoreVocabulary(
      model->terms, model->term_df, model->num_docs(), model->params);
  const DocTermMatrix dtm = BuildDtm({*d}, vocab);
  json spans = json::array();
  for (const auto &s : Highlight(*model, dtm, doc, topic, min_weight)) {
    spans.push_back(SpanJson(s));
  }
  return {{"model", m},
          {"doc_id", doc},
          {"topic", topic},
          {"min_weight", min_weight},
          {"body", d->body},
          {"spans", spans}};
}

// ---------------------------------------------------------------------------
// Sessions

void Service::Impl::PrepareSession(SessionState *state) {
  const auto corpus = LoadSnapshot(state->project, state->snapshot);
  Corpus sub;
  std::set<std::string> wanted(state->candidates.begin(),
                               state->candidates.end());
  for (const auto &d : corpus->documents) {
    if (wanted.contains(d.id)) sub.documents.push_back(d);
  }
  const AnalysisParams params = state->preprocessing.Resolve(sub);
  const Vocabulary vocab = BuildVocabulary(sub.documents, params);
  state->dtm = BuildDtm(sub.documents, vocab);
}

json Service::Impl::CreateSession(const std::string &p, const json &body) {
  const auto request = workflow::SessionRequest::FromJson(body);
  auto state = std::make_shared<SessionState>();
  state->project = p;
  {
    std::lock_guard lk(mu);
    FindProject(p);
    state->snapshot = LatestSnapshot(p);
  }
  const auto corpus = LoadSnapshot(p, state->snapshot);
  if (request.candidates) {
    std::vector<FieldError> errors;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < request.candidates->size(); ++i) {
      const std::string &id = (*request.candidates)[i];
      const std::string path = "candidates[" + std::to_string(i) + "]";
      if (!corpus->Find(id)) {
        errors.push_back({path, "unknown document " + id});
      } else if (!seen.insert(id).second) {
        errors.push_back({path, "duplicate document " + id});
      }
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
    state->candidates.assign(seen.begin(), seen.end());
  } else {
    for (const auto &d : corpus->documents) state->candidates.push_back(d.id);
    std::sort(state->candidates.begin(), state->candidates.end());
  }
  state->preprocessing = request.preprocessing;
  state->session.emplace(request.codebook, state->candidates, request.strategy,
                         request.seed);
  PrepareSession(state.get());
  {
    std::lock_guard lk(mu);
    state->id = "s" + std::to_string(next_session++);
    state->created = options.clock();
    sessions.emplace(state->id, state);
  }
  {
    std::lock_guard lk(state->mu);
    SaveSession(*state);
  }
  return SessionJson(state->id);
}

std::shared_ptr<SessionState> Service::Impl::FindSession(const std::string &s) {
  std::lock_guard lk(mu);
  auto it = sessions.find(s);
  if (it == sessions.end()) throw NotFound("session " + s + " not found");
  return it->second;
}

void Service::Impl::SaveSession(const SessionState &state) {
  WriteJson(SessionFile(state.id),
            {{"id", state.id},
             {"project", state.project},
             {"snapshot", state.snapshot},
             {"created", state.created},
             {"preprocessing", state.preprocessing.ToJson()},
             {"candidates", state.candidates},
             {"session", state.session->ToJson()},
             {"model_version",
              state.model ? json(state.model_version) : json(nullptr)},
             {"trained_labels", state.trained_labels}});
}

json Service::Impl::SessionJson(const std::string &s) {
  auto state = FindSession(s);
  std::lock_guard lk(state->mu);
  const CodingSession &cs = *state->session;
  json labeled = json::object();
  for (const auto &[doc, e] : cs.labeled()) {
    labeled[doc] = {{"code", e.code},
                    {"author", e.author},
                    {"timestamp", e.timestamp}};
  }
  json history = json::array();
  for (const auto &r : cs.metrics_history()) history.push_back(r.ToJson());
  return {{"id", state->id},
          {"project", state->project},
          {"snapshot", state->snapshot},
          {"created", state->created},
          {"strategy", StrategyName(cs.strategy())},
          {"seed", cs.seed()},
          {"codebook", cs.codebook().ToJson()},
          {"candidates", state->candidates.size()},
          {"labeled", labeled},
          {"queue", cs.queue().size()},
          {"label_version", cs.label_version()},
          {"model_version",
           state->model ? json(state->model_version) : json(nullptr)},
          {"retrain_needed", cs.retrain_needed()},
          {"metrics_history", history}};
}

json Service::Impl::RecordLabel(const std::string &s, const json &body) {
  if (!body.is_object()) throw ValidationError("body", "must be an object");
  std::vector<FieldError> errors;
  static const std::set<std::string> kKeys = {"doc_id", "code", "author",
                                              "overwrite"};
  for (const auto &[key, value] : body.items()) {
    if (!kKeys.contains(key)) errors.push_back({key, "unknown field"});
  }
  auto str = [&](const char *key, bool required) {
    auto it = body.find(key);
    if (it == body.end()) {
      if (required) errors.push_back({key, "required"});
      return std::string();
    }
    if (!it->is_string()) {
      errors.push_back({key, "must be a string"});
      return std::string();
    }
    return it->get<std::string>();
  };
  const std::string doc = str("doc_id", true);
  const std::string code = str("code", true);
  const std::string author = str("author", false);
  bool overwrite = false;
  if (auto it = body.find("overwrite"); it != body.end()) {
    if (!it->is_boolean()) {
      errors.push_back({"overwrite", "must be a boolean"});
    } else {
      overwrite = it->get<bool>();
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  auto state = FindSession(s);
  std::lock_guard lk(state->mu);
  CodingSession &cs = *state->session;
  if (!std::binary_search(state->candidates.begin(), state->candidates.end(),
                          doc)) {
    errors.push_back({"doc_id", "not a candidate of session " + s});
  }
  if (cs.codebook().IndexOf(code) < 0) {
    errors.push_back({"code", "unknown code " + code});
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  if (cs.labeled().contains(doc) && !overwrite) {
    throw Conflict("document " + doc +
                   " is already labeled; set overwrite to relabel it");
  }
  cs.RecordLabel(doc, code, author, options.clock(), overwrite);
  SaveSession(*state);
  ScheduleRetrain(state);
  return {{"doc_id", doc},
          {"code", code},
          {"label_version", cs.label_version()},
          {"labeled", cs.labeled().size()},
          {"queue", cs.queue().size()}};
}

json Service::Impl::NextQuery(const std::string &s) {
  auto state = FindSession(s);
  std::lock_guard lk(state->mu);
  CodingSession &cs = *state->session;
  if (cs.queue().empty()) throw Conflict("queue of session " + s + " is empty");
  const std::size_t n = cs.codebook().codes.size();
  std::map<std::string, std::vector<double>> posteriors;
  for (const auto &doc : cs.queue()) {
    if (state->model) {
      const DocRow *row = state->dtm.Find(doc);
      posteriors[doc] = Predict(*state->model, *row).posterior;
    } else {
      posteriors[doc] = std::vector<double>(n, 1.0 / static_cast<double>(n));
    }
  }
  const std::string doc = cs.NextQuery(posteriors);
  SaveSession(*state);
  json posterior = json::array();
  const auto &p = posteriors.at(doc);
  for (std::size_t c = 0; c < n; ++c) {
    posterior.push_back({{"code", cs.codebook().codes[c].id},
                         {"probability", p[c]}});
  }
  const bool stale =
      !state->model || state->model_version < cs.label_version();
  return {{"doc_id", doc},
          {"posterior", posterior},
          {"model_version",
           state->model ? json(state->model_version) : json(nullptr)},
          {"label_version", cs.label_version()},
          {"stale", stale}};
}

void Service::Impl::ScheduleRetrain(
    const std::shared_ptr<SessionState> &state) {
  if (state->retrain_scheduled || !state->session->retrain_needed()) return;
  state->retrain_scheduled = true;
  PostTask([this, state] { Retrain(state); });
}

void Service::Impl::Retrain(const std::shared_ptr<SessionState> &state) {
  LabelMap labels;
  Codebook codebook;
  int version = 0;
  std::uint64_t seed = 0;
  {
    std::lock_guard lk(state->mu);
    state->retrain_scheduled = false;
    labels = state->session->Labels();
    codebook = state->session->codebook();
    version = state->session->label_version();
    seed = state->session->seed();
  }
  std::map<std::string, int> per_code;
  for (const auto &[doc, code] : labels) ++per_code[code];
  int smallest = std::numeric_limits<int>::max();
  for (const auto &c : codebook.codes) {
    smallest = std::min(smallest, per_code[c.id]);
  }
  if (smallest < 1) return;
  NaiveBayesModel model = TrainNaiveBayes(state->dtm, labels, codebook);
  std::optional<EvalReport> report;
  if (smallest >= 2) {
    try {
      report = Evaluate(state->dtm, labels, codebook, 2, seed);
    } catch (const Error &) {
      report.reset();
    }
  }
  std::lock_guard lk(state->mu);
  if (!state->model || version > state->model_version) {
    state->model = std::move(model);
    state->model_version = version;
    state->trained_labels = labels;
    if (version == state->session->label_version()) {
      state->session->MarkTrained();
    }
    if (report) state->session->metrics_history().push_back(*report);
    SaveSession(*state);
  }
  ScheduleRetrain(state);
}

// ---------------------------------------------------------------------------
// Startup

void Service::Impl::LoadSessionFromDisk(const fs::path &file) {
  const json j = ReadJson(file);
  auto state = std::make_shared<SessionState>();
  state->id = j.at("id").get<std::string>();
  state->project = j.at("project").get<std::string>();
  state->snapshot = j.at("snapshot").get<int>();
  state->created = j.at("created").get<std::string>();
  state->preprocessing =
      workflow::Preprocessing::FromJson(j.at("preprocessing"));
  state->candidates = j.at("candidates").get<std::vector<std::string>>();
  state->session.emplace(CodingSession::FromJson(j.at("session")));
  state->trained_labels = j.at("trained_labels").get<LabelMap>();
  PrepareSession(state.get());
  if (!j.at("model_version").is_null()) {
    state->model_version = j["model_version"].get<int>();
    state->model = TrainNaiveBayes(state->dtm, state->trained_labels,
                                   state->session->codebook());
  }
  if (auto n = Ordinal(state->id, 's')) {
    next_session = std::max(next_session, *n + 1);
  }
  if (state->session->retrain_needed()) {
    state->retrain_scheduled = true;
    tasks.push_back([this, state] { Retrain(state); });
  }
  sessions.emplace(state->id, state);
}

void Service::Impl::Recover() {
  std::vector<std::shared_ptr<JobState>> requeue;
  const fs::path root = options.data_dir / "projects";
  for (const auto &entry : fs::directory_iterator(root)) {
    const std::string p = entry.path().filename().string();
    auto n = Ordinal(p, 'p');
    if (!n || !fs::exists(entry.path() / "project.json")) continue;
    next_project = std::max(next_project, *n + 1);
    const json pj = ReadJson(entry.path() / "project.json");
    ProjectState ps;
    ps.id = p;
    ps.name = pj.at("name").get<std::string>();
    ps.created = pj.at("created").get<std::string>();
    RemoveTempDirs(entry.path() / "snapshots");
    RemoveTempDirs(entry.path() / "results");
    if (fs::is_directory(entry.path() / "snapshots")) {
      for (const auto &s : fs::directory_iterator(entry.path() / "snapshots")) {
        if (auto v = ParseInt(s.path().filename().string())) {
          ps.snapshots.push_back(*v);
        }
      }
    }
    std::sort(ps.snapshots.begin(), ps.snapshots.end());
    std::vector<std::pair<int, std::shared_ptr<JobState>>> jobs;
    if (fs::is_directory(entry.path() / "jobs")) {
      for (const auto &f : fs::directory_iterator(entry.path() / "jobs")) {
        const std::string name = f.path().filename().string();
        if (!name.ends_with(".json") || name.ends_with(".request.json")) {
          continue;
        }
        auto job = std::make_shared<JobState>();
        job->record = JobRecord::FromJson(ReadJson(f.path()));
        auto jn = Ordinal(job->record.id, 'j');
        if (!jn) continue;
        ps.next_job = std::max(ps.next_job, *jn + 1);
        next_seq = std::max(next_seq, job->record.seq + 1);
        job->progress = job->record.progress;
        if (job->record.status == "RUNNING") {
          job->record.status = "FAILED";
          job->record.error = "interrupted";
          job->record.finished = options.clock();
          SaveJob(*job);
        } else if (job->record.status == "QUEUED") {
          job->request = ReadJson(RequestFile(p, job->record.id));
          requeue.push_back(job);
        }
        jobs.emplace_back(*jn, job);
      }
    }
    std::sort(jobs.begin(), jobs.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto &[jn, job] : jobs) ps.jobs.push_back(job);
    projects.emplace(p, std::move(ps));
  }
  std::sort(requeue.begin(), requeue.end(), [](const auto &a, const auto &b) {
    return a->record.seq < b->record.seq;
  });
  queue.assign(requeue.begin(), requeue.end());
  const fs::path sroot = options.data_dir / "sessions";
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(sroot)) {
    if (fs::exists(entry.path() / "session.json")) {
      files.push_back(entry.path() / "session.json");
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto &f : files) LoadSessionFromDisk(f);
}

// ---------------------------------------------------------------------------
// Service

Service::Service(ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

Response Service::Handle(std::string_view method, std::string_view path,
                         const Query &query, std::string_view body) {
  return Route(impl_.get(), method, path, query, body);
}

void Service::WaitIdle() { impl_->WaitIdle(); }

void Service::Pause() {
  std::lock_guard lk(impl_->mu);
  impl_->paused = true;
}

void Service::Resume() {
  {
    std::lock_guard lk(impl_->mu);
    impl_->paused = false;
  }
  impl_->cv.notify_all();
}

}  // namespace cmwb::service
