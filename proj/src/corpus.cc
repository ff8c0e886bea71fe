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

#include "cmwb/corpus.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "cmwb/csv.h"
#include "cmwb/error.h"
#include "cmwb/fileutil.h"

namespace cmwb {

namespace fs = std::filesystem;

std::string_view EntityKindName(EntityKind kind) {
  switch (kind) {
    case EntityKind::kLocation: return "LOCATION";
    case EntityKind::kPerson: return "PERSON";
    case EntityKind::kOrganization: return "ORGANIZATION";
    case EntityKind::kOther: return "OTHER";
  }
  return "OTHER";
}

EntityKind ParseEntityKind(std::string_view name) {
  std::string upper(name);
  for (char &c : upper) c = static_cast<char>(std::toupper(c));
  if (upper == "LOCATION") return EntityKind::kLocation;
  if (upper == "PERSON") return EntityKind::kPerson;
  if (upper == "ORGANIZATION") return EntityKind::kOrganization;
  if (upper == "OTHER") return EntityKind::kOther;
  throw Error("unknown entity kind '" + std::string(name) + "'");
}

const Document *Corpus::Find(std::string_view id) const {
  for (const auto &doc : documents) {
    if (doc.id == id) return &doc;
  }
  return nullptr;
}

void Corpus::RefreshSchema() {
  std::set<std::string> keys;
  for (const auto &doc : documents) {
    for (const auto &[k, v] : doc.metadata) keys.insert(k);
  }
  schema.assign(keys.begin(), keys.end());
}

ColumnTarget ColumnTarget::Parse(std::string_view spec) {
  ColumnTarget t;
  if (spec == "id") {
    t.kind = kId;
  } else if (spec == "title") {
    t.kind = kTitle;
  } else if (spec == "body") {
    t.kind = kBody;
  } else if (spec == "date") {
    t.kind = kDate;
  } else if (spec.starts_with("metadata:") && spec.size() > 9) {
    t.kind = kMetadata;
    t.field = std::string(spec.substr(9));
  } else {
    throw Error("unknown column target '" + std::string(spec) +
                "' (expected id, title, body, date or metadata:<field>)");
  }
  return t;
}

std::string ColumnTarget::ToString() const {
  switch (kind) {
    case kId: return "id";
    case kTitle: return "title";
    case kBody: return "body";
    case kDate: return "date";
    case kMetadata: return "metadata:" + field;
  }
  return "body";
}

ImportMapping ImportMapping::InverseOfExport(
    const std::vector<std::string> &header) {
  ImportMapping mapping;
  for (const auto &col : header) {
    if (col == "id" || col == "title" || col == "date" || col == "body") {
      mapping.columns[col] = ColumnTarget::Parse(col);
    } else {
      mapping.columns[col] = ColumnTarget{ColumnTarget::kMetadata, col};
    }
  }
  return mapping;
}

std::string ImportReport::ToText() const {
  std::ostringstream out;
  out << "rows: " << rows_total << ", accepted: " << accepted
      << ", rejected: " << rejected.size() << "\n";
  for (const auto &r : rejected) {
    out << "  row " << r.row << ": " << r.reason << "\n";
  }
  return out.str();
}

nlohmann::json ImportReport::ToJson() const {
  nlohmann::json rej = nlohmann::json::array();
  for (const auto &r : rejected) {
    rej.push_back({{"row", r.row}, {"reason", r.reason}});
  }
  return {{"rows_total", rows_total},
          {"accepted", accepted},
          {"rejected", rej}};
}

namespace {

void CheckMapping(const ImportMapping &mapping) {
  int body = 0, id = 0, title = 0, date = 0;
  std::set<std::string> fields;
  for (const auto &[col, target] : mapping.columns) {
    switch (target.kind) {
      case ColumnTarget::kBody: ++body; break;
      case ColumnTarget::kId: ++id; break;
      case ColumnTarget::kTitle: ++title; break;
      case ColumnTarget::kDate: ++date; break;
      case ColumnTarget::kMetadata:
        if (!fields.insert(target.field).second) {
          throw Error("metadata field '" + target.field +
                      "' is mapped from more than one column");
        }
        break;
    }
  }
  if (body == 0) throw Error("no body column");
  if (body > 1) throw Error("more than one column maps to body");
  if (id > 1 || title > 1 || date > 1) {
    throw Error("at most one column may map to each of id, title and date");
  }
}

}  // namespace

ImportResult ImportCsvText(std::string_view data,
                           const ImportMapping &mapping) {
  CheckMapping(mapping);
  const auto rows = csv::Parse(data, mapping.delimiter);
  if (rows.empty()) throw Error("malformed CSV: missing header row");
  const auto &header = rows.front();

  struct Bound {
    std::size_t column;
    ColumnTarget target;
  };
  std::vector<Bound> bound;
  bool has_id = false;
  for (const auto &[col, target] : mapping.columns) {
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) {
      throw Error("mapped column '" + col + "' not found in header");
    }
    bound.push_back({static_cast<std::size_t>(it - header.begin()), target});
    if (target.kind == ColumnTarget::kId) has_id = true;
  }

  ImportResult result;
  std::set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &row = rows[r];
    ++result.report.rows_total;
    Document doc;
    std::string reject;
    for (const auto &b : bound) {
      const std::string &value = row[b.column];
      switch (b.target.kind) {
        case ColumnTarget::kId: doc.id = value; break;
        case ColumnTarget::kTitle: doc.title = value; break;
        case ColumnTarget::kBody: doc.body = value; break;
        case ColumnTarget::kDate:
          if (!value.empty()) {
            doc.date = ParseDate(value, mapping.date_format);
            if (!doc.date) reject = "date parse";
          }
          break;
        case ColumnTarget::kMetadata:
          // Empty cells mean "field absent" so exports round-trip.
          if (!value.empty()) doc.metadata[b.target.field] = value;
          break;
      }
    }
    try {
      text::Decode(doc.body);
      text::Decode(doc.title);
    } catch (const Error &) {
      reject = "invalid UTF-8";
    }
    if (has_id && doc.id.empty() && reject.empty()) reject = "empty id";
    if (!reject.empty()) {
      result.report.rejected.push_back({r, reject});
      continue;
    }
    if (!has_id) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%06zu", r - 1);
      doc.id = buf;
    }
    if (!seen_ids.insert(doc.id).second) {
      throw Error("duplicate id '" + doc.id + "' on data row " +
                  std::to_string(r));
    }
    result.documents.push_back(std::move(doc));
    ++result.report.accepted;
  }
  return result;
}

ImportResult ImportCsv(const fs::path &path, const ImportMapping &mapping) {
  if (!fs::exists(path)) throw Error("no such file: " + path.string());
  return ImportCsvText(ReadFile(path), mapping);
}

ImportResult ImportPlainText(const fs::path &path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto &entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw Error("no such file or directory: " + path.string());
  }
  ImportResult result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    ++result.report.rows_total;
    Document doc;
    doc.id = files[i].stem().string();
    doc.title = doc.id;
    doc.body = ReadFile(files[i]);
    try {
      text::Decode(doc.body);
    } catch (const Error &) {
      result.report.rejected.push_back({i + 1, "invalid UTF-8"});
      continue;
    }
    result.documents.push_back(std::move(doc));
    ++result.report.accepted;
  }
  return result;
}

Gazetteer ParseGazetteer(std::string_view data) {
  Gazetteer gazetteer;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) eol = data.size();
    std::string_view line = data.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error("gazetteer line " + std::to_string(line_no) +
                  ": expected surface<TAB>kind");
    }
    gazetteer[text::ToLower(line.substr(0, tab))] =
        ParseEntityKind(line.substr(tab + 1));
  }
  return gazetteer;
}

Gazetteer LoadGazetteer(const fs::path &path) {
  return ParseGazetteer(ReadFile(path));
}

Document TagEntities(Document doc, const Gazetteer &gazetteer) {
  doc.entity_tags.clear();
  if (gazetteer.empty()) return doc;

  struct Key {
    std::u32string text;
    EntityKind kind;
  };
  std::vector<Key> keys;
  for (const auto &[surface, kind] : gazetteer) {
    auto lowered = text::ToLower(text::Decode(surface));
    if (!lowered.empty()) keys.push_back({std::move(lowered), kind});
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key &a, const Key &b) {
    return a.text.size() > b.text.size();
  });

  const std::u32string body = text::Decode(doc.body);
  const std::u32string lowered = text::ToLower(body);
  const std::size_t n = body.size();
  std::size_t i = 0;
  while (i < n) {
    const bool starts_word =
        i == 0 || !text::IsWordChar(body[i - 1]) ||
        !text::IsWordChar(body[i]);
    const Key *match = nullptr;
    if (starts_word) {
      for (const auto &key : keys) {
        const std::size_t end = i + key.text.size();
        if (end > n) continue;
        if (lowered.compare(i, key.text.size(), key.text) != 0) continue;
        if (end < n && text::IsWordChar(body[end - 1]) &&
            text::IsWordChar(body[end])) {
          continue;
        }
        match = &key;
        break;
      }
    }
    if (match == nullptr) {
      ++i;
      continue;
    }
    const std::size_t end = i + match->text.size();
    doc.entity_tags.push_back(
        {i, end, match->kind, text::Encode(body.substr(i, end - i))});
    i = end;
  }
  return doc;
}

std::vector<std::string> Shingles(std::string_view body) {
  const std::u32string text = text::ToLower(text::Decode(body));
  std::vector<std::string> words;
  for (const auto &span : text::SplitWords(text)) {
    words.push_back(text::Encode(text.substr(span.start, span.length())));
  }
  constexpr std::size_t kWidth = 5;
  std::vector<std::string> shingles;
  auto join = [&](std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t k = from; k < to; ++k) {
      if (k > from) s.push_back(' ');
      s += words[k];
    }
    return s;
  };
  if (words.empty()) return shingles;
  if (words.size() < kWidth) {
    shingles.push_back(join(0, words.size()));
  } else {
    for (std::size_t i = 0; i + kWidth <= words.size(); ++i) {
      shingles.push_back(join(i, i + kWidth));
    }
  }
  std::sort(shingles.begin(), shingles.end());
  shingles.erase(std::unique(shingles.begin(), shingles.end()),
                 shingles.end());
  return shingles;
}

double Jaccard(const std::vector<std::string> &a,
               const std::vector<std::string> &b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common, ++ia, ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<DuplicateGroup> Deduplicate(const std::vector<Document> &corpus,
                                        double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error("threshold must lie in (0, 1]");
  }
  if (corpus.empty()) throw Error("corpus is empty");

  // Work in id order so the result does not depend on input order.
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus[a].id < corpus[b].id;
  });
  const std::size_t n = order.size();
  std::vector<std::vector<std::string>> shingles(n);
  for (std::size_t i = 0; i < n; ++i) {
    shingles[i] = Shingles(corpus[order[i]].body);
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<double> best(n, 0.0);
  std::vector<bool> linked(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = Jaccard(shingles[i], shingles[j]);
      if (s < threshold) continue;
      linked[i] = linked[j] = true;
      best[i] = std::max(best[i], s);
      best[j] = std::max(best[j], s);
      const std::size_t a = find(i), b = find(j);
      // Smaller index wins, so the root is the smallest id in the group.
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }

  std::map<std::size_t, DuplicateGroup> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (!linked[i]) continue;
    const std::size_t root = find(i);
    auto &g = groups[root];
    g.representative = corpus[order[root]].id;
    g.members.push_back(corpus[order[i]].id);
    g.similarity.push_back(i == root ? 1.0
                                     : Jaccard(shingles[i], shingles[root]));
    g.link_similarity.push_back(best[i]);
  }
  std::vector<DuplicateGroup> out;
  for (auto &[root, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace cmwb
