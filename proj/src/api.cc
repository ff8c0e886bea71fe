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

#include <string>
#include <vector>

#include "service_impl.h"

namespace cmwb::service {
namespace {

using nlohmann::json;

std::vector<std::string> Segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

Response JsonResponse(int status, const json &j) {
  return {status, "application/json", j.dump(2) + "\n"};
}

Response ErrorResponse(int status, const std::string &message) {
  return JsonResponse(status, {{"error", message}});
}

json ParseBody(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return json::object();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error &e) {
    throw BadRequest(std::string("malformed JSON body: ") + e.what());
  }
}

int TopicIndex(const std::string &s) {
  try {
    std::size_t used = 0;
    const int k = std::stoi(s, &used);
    if (used == s.size()) return k;
  } catch (const std::exception &) {
  }
  throw NotFound("topic " + s + " not found");
}

// A simple path pattern: "{}" matches any single segment.
bool Match(const std::vector<std::string> &segs,
           std::initializer_list<const char *> pattern) {
  if (segs.size() != pattern.size()) return false;
  std::size_t i = 0;
  for (const char *p : pattern) {
    if (std::string_view(p) != "{}" && segs[i] != p) return false;
    ++i;
  }
  return true;
}

Response Dispatch(Service::Impl *impl, std::string_view method,
                  const std::vector<std::string> &s, const Query &query,
                  std::string_view body) {
  const bool get = method == "GET";
  const bool post = method == "POST";
  if (post && Match(s, {"projects"})) {
    return JsonResponse(201, impl->CreateProject(ParseBody(body)));
  }
  if (get && Match(s, {"projects", "{}"})) {
    return JsonResponse(200, impl->ProjectJson(s[1]));
  }
  if (post && Match(s, {"projects", "{}", "import"})) {
    return JsonResponse(
        202, impl->SubmitJob(s[1], workflow::JobKind::kImport, ParseBody(body)));
  }
  if (get && Match(s, {"projects", "{}", "documents", "{}"})) {
    return JsonResponse(200, impl->GetDocument(s[1], s[3], query));
  }
  if (post && Match(s, {"projects", "{}", "jobs"})) {
    const json b = ParseBody(body);
    std::vector<FieldError> errors;
    if (!b.is_object()) throw ValidationError("body", "must be an object");
    for (const auto &[key, value] : b.items()) {
      if (key != "kind" && key != "params") {
        errors.push_back({key, "unknown field"});
      }
    }
    std::optional<workflow::JobKind> kind;
    if (auto it = b.find("kind"); it == b.end() || !it->is_string()) {
      errors.push_back({"kind", "required string"});
    } else if (!(kind = workflow::ParseJobKind(it->get<std::string>()))) {
      errors.push_back(
          {"kind",
           "must be import, dedup, cooc, lda, eval, simulate or export"});
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
    const json params = b.value("params", json::object());
    return JsonResponse(202, impl->SubmitJob(s[1], *kind, params));
  }
  if (get && Match(s, {"projects", "{}", "jobs", "{}"})) {
    return JsonResponse(200, impl->JobJson(s[1], s[3]));
  }
  if (post && Match(s, {"projects", "{}", "jobs", "{}", "cancel"})) {
    return JsonResponse(200, impl->CancelJob(s[1], s[3]));
  }
  if (get && Match(s, {"projects", "{}", "results", "{}"})) {
    return JsonResponse(200, impl->ResultJson(s[1], s[3]));
  }
  if (get && Match(s, {"projects", "{}", "results", "{}", "files", "{}"})) {
    return impl->ResultFile(s[1], s[3], s[5]);
  }
  if (post && Match(s, {"projects", "{}", "sessions"})) {
    {
      std::lock_guard lk(impl->mu);
      impl->FindProject(s[1]);
    }
    return JsonResponse(201, impl->CreateSession(s[1], ParseBody(body)));
  }
  if (get && Match(s, {"projects", "{}", "models", "{}"})) {
    return JsonResponse(200, impl->ModelJson(s[1], s[3], query));
  }
  if (post && Match(s, {"projects", "{}", "models", "{}", "topics", "{}",
                        "label"})) {
    return JsonResponse(200, impl->LabelTopic(s[1], s[3], TopicIndex(s[5]),
                                              ParseBody(body)));
  }
  if (get && Match(s, {"projects", "{}", "models", "{}", "topics", "{}",
                       "highlight", "{}"})) {
    return JsonResponse(200, impl->HighlightJson(s[1], s[3], TopicIndex(s[5]),
                                                 s[7], query));
  }
  if (post && Match(s, {"projects", "{}", "export", "{}"})) {
    json params = ParseBody(body);
    if (!params.is_object()) throw ValidationError("body", "must be an object");
    params["format"] = s[3];
    return JsonResponse(
        202, impl->SubmitJob(s[1], workflow::JobKind::kExport, params));
  }
  if (get && Match(s, {"sessions", "{}"})) {
    return JsonResponse(200, impl->SessionJson(s[1]));
  }
  if (post && Match(s, {"sessions", "{}", "labels"})) {
    return JsonResponse(200, impl->RecordLabel(s[1], ParseBody(body)));
  }
  if (get && Match(s, {"sessions", "{}", "next"})) {
    return JsonResponse(200, impl->NextQuery(s[1]));
  }
  throw NotFound("no route for " + std::string(method) + " /" +
                 [&] {
                   std::string p;
                   for (std::size_t i = 0; i < s.size(); ++i) {
                     if (i) p += '/';
                     p += s[i];
                   }
                   return p;
                 }());
}

}  // namespace

Response Route(Service::Impl *impl, std::string_view method,
               std::string_view path, const Query &query,
               std::string_view body) {
  try {
    return Dispatch(impl, method, Segments(path), query, body);
  } catch (const ValidationError &e) {
    json fields = json::array();
    for (const auto &f : e.fields()) {
      fields.push_back({{"path", f.path}, {"message", f.message}});
    }
    return JsonResponse(422, {{"error", "validation failed"},
                              {"fields", fields}});
  } catch (const NotFound &e) {
    return ErrorResponse(404, e.what());
  } catch (const Conflict &e) {
    return ErrorResponse(409, e.what());
  } catch (const BadRequest &e) {
    return ErrorResponse(400, e.what());
  } catch (const Error &e) {
    return ErrorResponse(400, e.what());
  } catch (const std::exception &e) {
    return ErrorResponse(500, e.what());
  }
}

}  // namespace cmwb::service
