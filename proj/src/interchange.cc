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

#include "cmwb/interchange.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "cmwb/csv.h"
#include "cmwb/error.h"
#include "cmwb/fileutil.h"
#include "cmwb/text.h"
#include "cmwb/xml.h"
#include "cmwb/zip.h"
#include "json.hpp"

namespace cmwb {

namespace {

constexpr std::string_view kFixedColumns[] = {"id", "title", "date", "body"};

std::uint64_t SplitMix(std::uint64_t *state) {
  std::uint64_t z = (*state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

bool IsHex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') ||
         (c >= 'A' && c <= 'F');
}

// XML 1.0 cannot carry most C0 controls, even as character references.
bool XmlRepresentable(std::string_view s) {
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return true;
}

std::size_t ParseOffset(const std::string *value, bool *ok) {
  *ok = false;
  if (value == nullptr || value->empty() || value->size() > 18) return 0;
  std::size_t v = 0;
  for (char c : *value) {
    if (c < '0' || c > '9') return 0;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  *ok = true;
  return v;
}

}  // namespace

std::string CorpusCsv(const Corpus &corpus) {
  std::set<std::string> fields;
  for (const auto &d : corpus.documents) {
    for (const auto &[k, v] : d.metadata) fields.insert(k);
  }
  for (std::string_view fixed : kFixedColumns) {
    if (fields.count(std::string(fixed))) {
      throw Error("metadata field '" + std::string(fixed) +
                  "' collides with a fixed CSV column");
    }
  }
  csv::Row header = {"id", "title", "date", "body"};
  header.insert(header.end(), fields.begin(), fields.end());
  std::string out = csv::FormatRow(header);
  for (const auto &d : corpus.documents) {
    csv::Row row = {d.id, d.title, d.date ? d.date->ToString() : "", d.body};
    for (const auto &f : fields) {
      auto it = d.metadata.find(f);
      row.push_back(it == d.metadata.end() ? "" : it->second);
    }
    out += csv::FormatRow(row);
  }
  return out;
}

void ExportCorpusCsv(const Corpus &corpus, const std::filesystem::path &path) {
  WriteFileAtomic(path, CorpusCsv(corpus));
}

Corpus ParseCorpusCsv(std::string_view data) {
  const auto rows = csv::Parse(data);
  if (rows.empty()) throw Error("corpus CSV is empty");
  for (std::string_view fixed : {"id", "body"}) {
    if (std::find(rows[0].begin(), rows[0].end(), fixed) == rows[0].end()) {
      throw Error("corpus CSV lacks the '" + std::string(fixed) + "' column");
    }
  }
  auto result = ImportCsvText(data, ImportMapping::InverseOfExport(rows[0]));
  if (!result.report.rejected.empty()) {
    const auto &r = result.report.rejected.front();
    throw Error("corpus CSV row " + std::to_string(r.row) + ": " + r.reason);
  }
  Corpus corpus;
  corpus.documents = std::move(result.documents);
  corpus.RefreshSchema();
  return corpus;
}

Corpus ImportCorpusCsv(const std::filesystem::path &path) {
  return ParseCorpusCsv(ReadFile(path));
}

void SaveCorpus(const Corpus &corpus, const std::filesystem::path &dir) {
  nlohmann::json entities = nlohmann::json::object();
  for (const auto &d : corpus.documents) {
    if (d.entity_tags.empty()) continue;
    auto &list = entities[d.id] = nlohmann::json::array();
    for (const auto &e : d.entity_tags) {
      list.push_back({{"start", e.start},
                      {"end", e.end},
                      {"kind", EntityKindName(e.kind)},
                      {"surface", e.surface}});
    }
  }
  WriteFileAtomic(dir / "documents.csv", CorpusCsv(corpus));
  WriteFileAtomic(dir / "entities.json", entities.dump(2) + "\n");
}

Corpus LoadCorpus(const std::filesystem::path &dir) {
  Corpus corpus = ImportCorpusCsv(dir / "documents.csv");
  const auto ent_path = dir / "entities.json";
  if (!std::filesystem::exists(ent_path)) return corpus;
  nlohmann::json entities;
  try {
    entities = nlohmann::json::parse(ReadFile(ent_path));
    for (auto &d : corpus.documents) {
      auto it = entities.find(d.id);
      if (it == entities.end()) continue;
      for (const auto &e : *it) {
        d.entity_tags.push_back({e.at("start").get<std::size_t>(),
                                 e.at("end").get<std::size_t>(),
                                 ParseEntityKind(e.at("kind").get<std::string>()),
                                 e.at("surface").get<std::string>()});
      }
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error("entities.json: " + std::string(e.what()));
  }
  return corpus;
}

std::string MakeGuid(std::uint64_t seed, std::string_view kind,
                     std::uint64_t ordinal) {
  std::uint64_t state = seed ^ Fnv1a(kind);
  SplitMix(&state);
  state ^= ordinal * 0xD1B54A32D192ED03ULL;
  std::uint64_t hi = SplitMix(&state);
  std::uint64_t lo = SplitMix(&state);
  hi = (hi & ~0xF000ULL) | 0x4000ULL;                       // version 4
  lo = (lo & ~(0xC0ULL << 56)) | (0x80ULL << 56);           // RFC variant
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xFFFF),
                static_cast<unsigned>(hi & 0xFFFF),
                static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

bool IsGuid(std::string_view s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool dash = i == 8 || i == 13 || i == 18 || i == 23;
    if (dash ? s[i] != '-' : !IsHex(s[i])) return false;
  }
  return true;
}

void QdpxProject::Validate() const {
  std::set<std::string> guids;
  auto check_guid = [&](const std::string &guid, const char *what) {
    if (!IsGuid(guid)) {
      throw Error(std::string(what) + " guid '" + guid + "' is not RFC 4122");
    }
    if (!guids.insert(guid).second) {
      throw Error("duplicate guid " + guid);
    }
  };
  std::set<std::string> code_guids;
  for (const auto &c : codes) {
    check_guid(c.guid, "code");
    code_guids.insert(c.guid);
    if (!XmlRepresentable(c.name)) {
      throw Error("code " + c.guid + " name has control characters");
    }
  }
  std::map<std::string, std::size_t> lengths;
  for (const auto &s : sources) {
    check_guid(s.guid, "source");
    try {
      lengths[s.guid] = text::Decode(s.text).size();
    } catch (const Error &) {
      throw Error("source " + s.guid + " is not valid UTF-8");
    }
    if (!XmlRepresentable(s.text) || !XmlRepresentable(s.document_id)) {
      throw Error("source " + s.guid + " contains control characters");
    }
  }
  for (const auto &sel : selections) {
    auto it = lengths.find(sel.source_guid);
    if (it == lengths.end()) {
      throw Error("selection references unknown source " + sel.source_guid);
    }
    if (!code_guids.count(sel.code_guid)) {
      throw Error("selection references unknown code " + sel.code_guid);
    }
    if (sel.start > sel.end || sel.end > it->second) {
      throw Error("selection " + std::to_string(sel.start) + "-" +
                  std::to_string(sel.end) + " out of range for source " +
                  sel.source_guid);
    }
  }
}

void QdpxProject::SortSelections() {
  std::map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < sources.size(); ++i) order[sources[i].guid] = i;
  auto key = [&](const QdpxSelection &s) {
    auto it = order.find(s.source_guid);
    return std::tuple(it == order.end() ? sources.size() : it->second, s.start,
                      s.end, std::string_view(s.code_guid));
  };
  std::stable_sort(selections.begin(), selections.end(),
                   [&](const auto &a, const auto &b) { return key(a) < key(b); });
}

QdpxProject ProjectFromLabels(std::string name, const Corpus &corpus,
                              const Codebook &codebook, const LabelMap &labels,
                              std::uint64_t seed) {
  QdpxProject p;
  p.name = std::move(name);
  std::map<std::string, std::string> code_guid;
  for (std::size_t i = 0; i < codebook.codes.size(); ++i) {
    const auto &c = codebook.codes[i];
    p.codes.push_back({MakeGuid(seed, "code", i), c.id});
    code_guid[c.id] = p.codes.back().guid;
  }
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto &d = corpus.documents[i];
    p.sources.push_back({MakeGuid(seed, "source", i), d.id, d.body});
    auto it = labels.find(d.id);
    if (it == labels.end()) continue;
    auto code = code_guid.find(it->second);
    if (code == code_guid.end()) {
      throw Error("label '" + it->second + "' on document " + d.id +
                  " is not in the codebook");
    }
    p.selections.push_back({p.sources.back().guid, 0,
                            text::ScalarLength(d.body), code->second});
  }
  p.SortSelections();
  return p;
}

std::string QdpxArchive(const QdpxProject &input) {
  QdpxProject project = input;
  project.Validate();
  project.SortSelections();
  using xml::Escape;

  std::string q = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  q += "<Project xmlns=\"urn:QDA-XML:project:1.0\" name=\"" +
       Escape(project.name, true) + "\" origin=\"cmwb\">\n";
  q += "  <CodeBook>\n";
  if (project.codes.empty()) {
    q += "    <Codes/>\n";
  } else {
    q += "    <Codes>\n";
    for (const auto &c : project.codes) {
      q += "      <Code guid=\"" + c.guid + "\" name=\"" + Escape(c.name, true) +
           "\" isCodable=\"true\"/>\n";
    }
    q += "    </Codes>\n";
  }
  q += "  </CodeBook>\n";

  std::multimap<std::string, const QdpxSelection *> by_source;
  for (const auto &s : project.selections) by_source.emplace(s.source_guid, &s);
  if (!project.sources.empty()) {
    q += "  <Sources>\n";
    std::uint64_t sel_ordinal = 0;
    const std::uint64_t sel_seed = Fnv1a(project.name);
    for (const auto &s : project.sources) {
      q += "    <TextSource guid=\"" + s.guid + "\" name=\"" +
           Escape(s.document_id, true) + "\" plainTextPath=\"internal://" +
           s.guid + ".txt\">\n";
      q += "      <PlainTextContent>" + Escape(s.text, false) +
           "</PlainTextContent>\n";
      auto [lo, hi] = by_source.equal_range(s.guid);
      for (auto it = lo; it != hi; ++it) {
        const auto &sel = *it->second;
        const std::string sel_guid =
            MakeGuid(sel_seed, "selection", sel_ordinal);
        const std::string coding_guid =
            MakeGuid(sel_seed, "coding", sel_ordinal);
        ++sel_ordinal;
        q += "      <PlainTextSelection guid=\"" + sel_guid +
             "\" startPosition=\"" + std::to_string(sel.start) +
             "\" endPosition=\"" + std::to_string(sel.end) + "\">\n";
        q += "        <Coding guid=\"" + coding_guid + "\">\n";
        q += "          <CodeRef targetGUID=\"" + sel.code_guid + "\"/>\n";
        q += "        </Coding>\n";
        q += "      </PlainTextSelection>\n";
      }
      q += "    </TextSource>\n";
    }
    q += "  </Sources>\n";
  }
  q += "</Project>\n";

  std::vector<zip::Entry> entries;
  entries.push_back({"project.qde", std::move(q)});
  std::vector<const QdpxSource *> sorted;
  for (const auto &s : project.sources) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto *a, const auto *b) { return a->guid < b->guid; });
  for (const auto *s : sorted) {
    entries.push_back({"sources/" + s->guid + ".txt", s->text});
  }
  return zip::Write(entries);
}

void ExportQdpx(const QdpxProject &project, const std::filesystem::path &path) {
  WriteFileAtomic(path, QdpxArchive(project));
}

namespace {

class QdeReader {
 public:
  QdeReader(const std::map<std::string, std::string> &files, QdpxImport *out)
      : files_(files), out_(out) {}

  void Read(const xml::Element &root) {
    if (root.name != "Project") {
      throw Error("project.qde root element is <" + root.name +
                  ">, expected <Project>");
    }
    if (const auto *n = root.Attribute("name")) out_->project.name = *n;
    for (const auto &child : root.children) {
      if (child.name == "CodeBook") {
        ReadCodeBook(child);
      } else if (child.name == "Sources") {
        ReadSources(child);
      } else {
        Ignore(child.name);
      }
    }
    for (const auto &[guid, target] : code_refs_) {
      if (!codes_.count(target)) {
        throw Error("dangling CodeRef " + target + " in selection " + guid);
      }
    }
  }

 private:
  void Ignore(const std::string &name) {
    if (ignored_.insert(name).second) {
      out_->warnings.push_back("ignored unsupported element <" + name + ">");
    }
  }

  void ReadCodeBook(const xml::Element &e) {
    for (const auto &child : e.children) {
      if (child.name == "Codes") {
        for (const auto &code : child.children) ReadCode(code);
      } else {
        Ignore(child.name);
      }
    }
  }

  // Nested codes are flattened; the hierarchy is outside the subset.
  void ReadCode(const xml::Element &e) {
    if (e.name != "Code") return Ignore(e.name);
    const auto *guid = e.Attribute("guid");
    const auto *name = e.Attribute("name");
    if (guid == nullptr || name == nullptr) {
      throw Error("Code element without guid or name");
    }
    out_->project.codes.push_back({*guid, *name});
    codes_.insert(*guid);
    for (const auto &child : e.children) ReadCode(child);
  }

  void ReadSources(const xml::Element &e) {
    for (const auto &child : e.children) {
      if (child.name == "TextSource") {
        ReadTextSource(child);
      } else {
        Ignore(child.name);
      }
    }
  }

  void ReadTextSource(const xml::Element &e) {
    QdpxSource src;
    const auto *guid = e.Attribute("guid");
    if (guid == nullptr) throw Error("TextSource element without guid");
    src.guid = *guid;
    if (const auto *n = e.Attribute("name")) src.document_id = *n;
    if (const auto *content = e.Child("PlainTextContent")) {
      src.text = content->text;
    } else if (const auto *path = e.Attribute("plainTextPath")) {
      constexpr std::string_view kInternal = "internal://";
      std::string entry = *path;
      if (entry.starts_with(kInternal)) {
        entry = "sources/" + entry.substr(kInternal.size());
      }
      auto it = files_.find(entry);
      if (it == files_.end()) {
        throw Error("source " + src.guid + ": missing text file " + *path);
      }
      src.text = it->second;
    } else {
      throw Error("source " + src.guid + " has no plain text");
    }
    std::size_t length = 0;
    try {
      length = text::Decode(src.text).size();
    } catch (const Error &) {
      throw Error("source " + src.guid + " is not valid UTF-8");
    }
    for (const auto &child : e.children) {
      if (child.name == "PlainTextContent") continue;
      if (child.name != "PlainTextSelection") {
        Ignore(child.name);
        continue;
      }
      ReadSelection(child, src.guid, length);
    }
    out_->project.sources.push_back(std::move(src));
  }

  void ReadSelection(const xml::Element &e, const std::string &source,
                     std::size_t length) {
    const auto *guid_attr = e.Attribute("guid");
    const std::string guid = guid_attr ? *guid_attr : "(no guid)";
    bool ok_start = false, ok_end = false;
    const std::size_t start =
        ParseOffset(e.Attribute("startPosition"), &ok_start);
    const std::size_t end = ParseOffset(e.Attribute("endPosition"), &ok_end);
    std::vector<std::string> targets;
    for (const auto &child : e.children) {
      if (child.name != "Coding") {
        Ignore(child.name);
        continue;
      }
      for (const auto &ref : child.children) {
        if (ref.name != "CodeRef") {
          Ignore(ref.name);
          continue;
        }
        const auto *target = ref.Attribute("targetGUID");
        if (target == nullptr) throw Error("CodeRef without targetGUID");
        targets.push_back(*target);
        code_refs_.emplace_back(guid, *target);
      }
    }
    if (!ok_start || !ok_end || start > end || end > length) {
      out_->warnings.push_back("selection " + guid +
                               " rejected: offsets outside source " + source);
      return;
    }
    if (targets.empty()) {
      out_->warnings.push_back("selection " + guid +
                               " skipped: no coding");
      return;
    }
    for (const auto &t : targets) {
      out_->project.selections.push_back({source, start, end, t});
    }
  }

  const std::map<std::string, std::string> &files_;
  QdpxImport *out_;
  std::set<std::string> codes_;
  std::set<std::string> ignored_;
  std::vector<std::pair<std::string, std::string>> code_refs_;
};

}  // namespace

QdpxImport ParseQdpxArchive(std::string_view archive) {
  std::map<std::string, std::string> files;
  for (auto &e : zip::Read(archive)) files[e.name] = std::move(e.data);
  auto qde = files.find("project.qde");
  if (qde == files.end()) throw Error("missing project.qde");
  QdpxImport result;
  QdeReader(files, &result).Read(xml::Parse(qde->second));
  result.project.SortSelections();
  result.project.Validate();
  return result;
}

QdpxImport ImportQdpx(const std::filesystem::path &path) {
  return ParseQdpxArchive(ReadFile(path));
}

void ExportTopicsCsv(const TopicModel &model,
                     const std::filesystem::path &dir) {
  WriteFileAtomic(dir / "theta.csv", ThetaCsv(model));
  WriteFileAtomic(dir / "phi.csv", PhiCsv(model));
}

void ExportCoocCsv(const CooccurrenceResult &result,
                   const std::filesystem::path &path) {
  WriteFileAtomic(path, CooccurrenceCsv(result));
}

void ExportLabelsCsv(const CodingSession &session,
                     const std::filesystem::path &path) {
  WriteFileAtomic(path, session.LabelsCsv());
}

}  // namespace cmwb
