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

#ifndef CMWB_CORPUS_H_
#define CMWB_CORPUS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmwb/date.h"
#include "cmwb/text.h"
#include "json.hpp"

namespace cmwb {

enum class EntityKind { kLocation, kPerson, kOrganization, kOther };

std::string_view EntityKindName(EntityKind kind);
// Case-insensitive; throws cmwb::Error on an unknown name.
EntityKind ParseEntityKind(std::string_view name);

struct EntitySpan {
  std::size_t start = 0;  // scalar-value offset, inclusive
  std::size_t end = 0;    // exclusive
  EntityKind kind = EntityKind::kOther;
  std::string surface;

  bool operator==(const EntitySpan &) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::optional<Date> date;
  std::map<std::string, std::string> metadata;
  std::vector<EntitySpan> entity_tags;

  bool operator==(const Document &) const = default;
};

// An immutable-by-convention snapshot of imported documents. `schema` lists
// every metadata key any document may carry, sorted.
struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> schema;

  const Document *Find(std::string_view id) const;
  // Recomputes `schema` from the documents' metadata keys.
  void RefreshSchema();
};

// Where a source column goes. Metadata targets carry the field name.
struct ColumnTarget {
  enum Kind { kId, kTitle, kBody, kDate, kMetadata } kind = kBody;
  std::string field;

  // "id", "title", "body", "date" or "metadata:<field>".
  static ColumnTarget Parse(std::string_view spec);
  std::string ToString() const;
};

struct ImportMapping {
  std::map<std::string, ColumnTarget> columns;
  std::string date_format = "%Y-%m-%d";
  char delimiter = ',';

  // The mapping that re-imports a file written by ExportCorpusCsv.
  static ImportMapping InverseOfExport(const std::vector<std::string> &header);
};

struct ImportReport {
  struct Rejection {
    std::size_t row = 0;  // 1-based data row, header excluded
    std::string reason;
  };
  std::size_t rows_total = 0;
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;

  std::string ToText() const;
  nlohmann::json ToJson() const;
};

struct ImportResult {
  std::vector<Document> documents;
  ImportReport report;
};

// Imports delimited text. Fatal problems (missing body mapping, unknown
// columns, malformed CSV, duplicate explicit ids) throw cmwb::Error;
// row-level problems such as an unparseable date are recorded in the report.
ImportResult ImportCsvText(std::string_view data, const ImportMapping &mapping);
ImportResult ImportCsv(const std::filesystem::path &path,
                       const ImportMapping &mapping);

// One document per regular file with a .txt extension (or the file itself
// when `path` is a file); id is the file stem, body is the content.
ImportResult ImportPlainText(const std::filesystem::path &path);

using Gazetteer = std::map<std::string, EntityKind>;

// "surface<TAB>kind" per line; blank lines and lines starting with '#' are
// skipped.
Gazetteer ParseGazetteer(std::string_view data);
Gazetteer LoadGazetteer(const std::filesystem::path &path);

// Replaces the document's entity tags with every maximal, non-overlapping,
// case-insensitive gazetteer match on token boundaries. Scans left to right
// and prefers the longest key at each start position.
Document TagEntities(Document doc, const Gazetteer &gazetteer);

struct DuplicateGroup {
  std::string representative;
  std::vector<std::string> members;  // sorted, includes representative
  // Jaccard similarity of each member against the representative.
  std::vector<double> similarity;
  // Highest similarity of each member to any other member. Always at least
  // the threshold, even when the transitive closure joins members whose
  // direct similarity to the representative is lower.
  std::vector<double> link_similarity;
};

// Word-level 5-shingles of a body (lowercased, punctuation-stripped words).
// Bodies shorter than five words yield one shingle of all their words.
std::vector<std::string> Shingles(std::string_view body);

double Jaccard(const std::vector<std::string> &a,
               const std::vector<std::string> &b);

// Groups documents whose shingle Jaccard similarity reaches `threshold`,
// closed transitively. Groups are ordered by representative id.
std::vector<DuplicateGroup> Deduplicate(const std::vector<Document> &corpus,
                                        double threshold);

}  // namespace cmwb

#endif  // CMWB_CORPUS_H_
