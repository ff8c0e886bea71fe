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

#ifndef CMWB_INTERCHANGE_H_
#define CMWB_INTERCHANGE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cmwb/classify.h"
#include "cmwb/cooccurrence.h"
#include "cmwb/corpus.h"
#include "cmwb/topics.h"

namespace cmwb {

// Corpus as CSV: `id,title,date,body,<metadata fields sorted>`, LF endings.
// Absent metadata and dates are written as empty cells. Throws if a metadata
// field collides with one of the fixed column names.
std::string CorpusCsv(const Corpus &corpus);
void ExportCorpusCsv(const Corpus &corpus, const std::filesystem::path &path);
// Reads a file written by ExportCorpusCsv. Any rejected row is an error.
Corpus ParseCorpusCsv(std::string_view data);
Corpus ImportCorpusCsv(const std::filesystem::path &path);

// A corpus directory holds documents.csv plus entities.json, which maps
// document ids to their entity tags.
void SaveCorpus(const Corpus &corpus, const std::filesystem::path &dir);
Corpus LoadCorpus(const std::filesystem::path &dir);

struct QdpxCode {
  std::string guid;
  std::string name;
  bool operator==(const QdpxCode &) const = default;
};

struct QdpxSource {
  std::string guid;
  std::string document_id;
  std::string text;
  bool operator==(const QdpxSource &) const = default;
};

struct QdpxSelection {
  std::string source_guid;
  std::size_t start = 0;  // scalar values
  std::size_t end = 0;
  std::string code_guid;
  bool operator==(const QdpxSelection &) const = default;
};

struct QdpxProject {
  std::string name;
  std::vector<QdpxCode> codes;
  std::vector<QdpxSource> sources;
  // Kept in canonical order: by source position, then start, end, code.
  std::vector<QdpxSelection> selections;

  // Throws cmwb::Error naming the offending guid.
  void Validate() const;
  void SortSelections();
  bool operator==(const QdpxProject &) const = default;
};

// Deterministic RFC 4122 version-4-shaped guid.
std::string MakeGuid(std::uint64_t seed, std::string_view kind,
                     std::uint64_t ordinal);
bool IsGuid(std::string_view s);

// One source per document, one code per codebook entry, and one selection
// spanning the whole body per labeled document.
QdpxProject ProjectFromLabels(std::string name, const Corpus &corpus,
                              const Codebook &codebook, const LabelMap &labels,
                              std::uint64_t seed);

// Archive bytes: project.qde first, then sources/<guid>.txt sorted by guid.
std::string QdpxArchive(const QdpxProject &project);
void ExportQdpx(const QdpxProject &project, const std::filesystem::path &path);

struct QdpxImport {
  QdpxProject project;
  std::vector<std::string> warnings;
};

QdpxImport ParseQdpxArchive(std::string_view archive);
QdpxImport ImportQdpx(const std::filesystem::path &path);

// theta.csv and phi.csv under `dir`.
void ExportTopicsCsv(const TopicModel &model, const std::filesystem::path &dir);
void ExportCoocCsv(const CooccurrenceResult &result,
                   const std::filesystem::path &path);
void ExportLabelsCsv(const CodingSession &session,
                     const std::filesystem::path &path);

}  // namespace cmwb

#endif  // CMWB_INTERCHANGE_H_
