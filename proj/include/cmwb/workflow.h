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

#ifndef CMWB_WORKFLOW_H_
#define CMWB_WORKFLOW_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cmwb/classify.h"
#include "cmwb/cooccurrence.h"
#include "cmwb/corpus.h"
#include "cmwb/pipeline.h"
#include "cmwb/topics.h"
#include "json.hpp"

// Analysis requests shared by the command line and the HTTP service. Both
// front-ends parse their input into these requests and run them through the
// same functions, so equal parameters and seeds yield identical files.
namespace cmwb::workflow {

// Output file name to content.
using Files = std::map<std::string, std::string>;

struct Output {
  Files files;
  nlohmann::json summary = nlohmann::json::object();
};

enum class JobKind { kImport, kDedup, kCooc, kLda, kEval, kSimulate, kExport };

std::string_view JobKindName(JobKind kind);  // "import", "dedup", ...
std::optional<JobKind> ParseJobKind(std::string_view name);
// Writer jobs produce a new corpus snapshot.
bool IsWriter(JobKind kind);

// Preprocessing shared by every analysis request: pipeline parameters plus
// entity kinds whose tagged surfaces join the blacklist.
struct Preprocessing {
  AnalysisParams analysis;
  std::set<EntityKind> entity_blacklist;

  // The analysis parameters with the entity blacklist folded in.
  AnalysisParams Resolve(const Corpus &corpus) const;
  nlohmann::json ToJson() const;
  // {analysis, entity_blacklist}
  static Preprocessing FromJson(const nlohmann::json &j,
                                const std::string &prefix = "");
};

struct CoocRequest {
  Preprocessing preprocessing;
  CooccurrenceOptions options;

  // {analysis, entity_blacklist, unit, measure, min_count, top_n}
  static CoocRequest FromJson(const nlohmann::json &j,
                              const std::string &prefix = "");
  nlohmann::json ToJson() const;
};

struct LdaRequest {
  Preprocessing preprocessing;
  LdaConfig config;

  // {analysis, entity_blacklist, k, alpha, beta, iterations, burn_in, seed}
  static LdaRequest FromJson(const nlohmann::json &j,
                             const std::string &prefix = "");
  nlohmann::json ToJson() const;
};

// Gold or training labels given inline or read from a metadata field.
struct LabelSource {
  LabelMap labels;
  std::string field;

  LabelMap Resolve(const Corpus &corpus) const;
};

struct EvalRequest {
  Preprocessing preprocessing;
  std::optional<Codebook> codebook;  // derived from the labels when absent
  LabelSource labels;
  int folds = 5;
  std::uint64_t seed = 1;

  // {analysis, entity_blacklist, codebook, labels | label_field, folds, seed}
  static EvalRequest FromJson(const nlohmann::json &j,
                              const std::string &prefix = "");
  nlohmann::json ToJson() const;
};

struct SimulateRequest {
  Preprocessing preprocessing;
  std::optional<Codebook> codebook;
  LabelSource gold;
  SimulationOptions options;

  // {analysis, entity_blacklist, codebook, labels | label_field, strategy,
  //  budget, seed, holdout_fraction}
  static SimulateRequest FromJson(const nlohmann::json &j,
                                  const std::string &prefix = "");
  nlohmann::json ToJson() const;
};

// Opens an active-learning coding session over a corpus snapshot.
struct SessionRequest {
  Preprocessing preprocessing;
  Codebook codebook;
  Strategy strategy = Strategy::kEntropy;
  std::uint64_t seed = 1;
  std::optional<std::vector<std::string>> candidates;  // all documents

  // {analysis, entity_blacklist, codebook, strategy, seed, candidates}
  static SessionRequest FromJson(const nlohmann::json &j,
                                 const std::string &prefix = "");
};

struct DedupRequest {
  double threshold = 0.8;

  static DedupRequest FromJson(const nlohmann::json &j,
                               const std::string &prefix = "");
  nlohmann::json ToJson() const;
};

struct ImportRequest {
  // "csv" uses `mapping`; "corpus_csv" reads a file written by the corpus
  // exporter.
  std::string format = "csv";
  std::string data;
  ImportMapping mapping;
  std::string gazetteer;  // optional "surface<TAB>kind" lines

  // {format, data, mapping: {column: target}, date_format, delimiter,
  //  gazetteer}
  static ImportRequest FromJson(const nlohmann::json &j,
                                const std::string &prefix = "");
  // Parameters without the payload, for job records.
  nlohmann::json ToJson() const;
};

// Polled between units of work; returning true aborts with cmwb::Cancelled.
using CancelCheck = std::function<bool()>;
// Receives a completed fraction in [0, 1].
using ProgressSink = std::function<void(double)>;

// Codebook of the distinct label values, in sorted order.
Codebook CodebookFromLabels(const LabelMap &labels);

// pairs.csv
Output RunCooc(const Corpus &corpus, const CoocRequest &request);

// The model directory files.
Output RunLda(const Corpus &corpus, const LdaRequest &request,
              const ProgressSink &progress = nullptr,
              const CancelCheck &cancelled = nullptr);
TopicModel FitLdaRequest(const Corpus &corpus, const LdaRequest &request,
                         const ProgressSink &progress = nullptr,
                         const CancelCheck &cancelled = nullptr);

// report.json and report.csv
Output RunEval(const Corpus &corpus, const EvalRequest &request);

// curve.csv
Output RunSimulate(const Corpus &corpus, const SimulateRequest &request);

struct CorpusOutput {
  Corpus corpus;
  Output output;
};

// Keeps one representative per duplicate group; writes groups.json.
CorpusOutput RunDedup(const Corpus &corpus, const DedupRequest &request);

// Parses the request payload into documents.
ImportResult ParseImport(const ImportRequest &request);
// Tags entities, appends to `base` and writes import_report.json. Throws
// when an imported id already exists in `base`.
CorpusOutput FinishImport(const Corpus &base, ImportResult imported,
                          const std::string &gazetteer);
CorpusOutput RunImport(const Corpus &base, const ImportRequest &request);

nlohmann::json GroupsJson(const std::vector<DuplicateGroup> &groups);
nlohmann::json DocumentJson(const Document &doc);

}  // namespace cmwb::workflow

#endif  // CMWB_WORKFLOW_H_
