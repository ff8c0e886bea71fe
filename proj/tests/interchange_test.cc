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

#include <filesystem>
#include <set>

#include "cmwb/csv.h"
#include "cmwb/error.h"
#include "cmwb/fileutil.h"
#include "cmwb/synth.h"
#include "cmwb/text.h"
#include "cmwb/xml.h"
#include "cmwb/zip.h"
#include "doctest.h"

namespace cmwb {
namespace {

namespace fs = std::filesystem;

const std::string kFixtures = std::string(CMWB_TEST_DATA) + "/fixtures";

fs::path TempDir(const char *name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Corpus SmallCorpus() {
  Corpus c;
  Document a;
  a.id = "a";
  a.title = "First, \"quoted\"";
  a.body = "Body with \"quotes\", commas\nand a newline.";
  a.date = Date{2015, 12, 12};
  a.metadata = {{"country", "Gambia"}, {"annex", "Non-Annex"}};
  Document b;
  b.id = "b";
  b.body = "K\xC3\xB6ln\r\nzweite Zeile";
  b.metadata = {{"country", "Germany"}};
  c.documents = {a, b};
  c.RefreshSchema();
  return c;
}

TEST_CASE("corpus csv layout") {
  const auto csv = CorpusCsv(SmallCorpus());
  const auto rows = csv::Parse(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == csv::Row{"id", "title", "date", "body", "annex", "country"});
  CHECK(csv.find("\"Body with \"\"quotes\"\", commas\nand a newline.\"") !=
        std::string::npos);
  CHECK(csv.find('\r') == csv.find("\r\nzweite"));
  CHECK(rows[2][2].empty());
}

TEST_CASE("corpus csv round trip is field identical") {
  const auto dir = TempDir("cmwb_corpus_csv");
  const auto original = SmallCorpus();
  ExportCorpusCsv(original, dir / "c.csv");
  const auto back = ImportCorpusCsv(dir / "c.csv");
  REQUIRE(back.documents.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto &x = original.documents[i], &y = back.documents[i];
    CHECK(x.id == y.id);
    CHECK(x.title == y.title);
    CHECK(x.body == y.body);
    CHECK(x.date == y.date);
    CHECK(x.metadata == y.metadata);
  }
  CHECK(back.schema == original.schema);
  ExportCorpusCsv(back, dir / "again.csv");
  CHECK(ReadFile(dir / "c.csv") == ReadFile(dir / "again.csv"));
  fs::remove_all(dir);
}

TEST_CASE("the synthetic study corpus round trips") {
  auto study = synth::NdcStyleCorpus(3, 3);
  Corpus c;
  const auto g = ParseGazetteer(study.gazetteer);
  for (auto &d : study.documents) c.documents.push_back(TagEntities(d, g));
  c.RefreshSchema();
  const auto dir = TempDir("cmwb_corpus_dir");
  SaveCorpus(c, dir);
  const auto back = LoadCorpus(dir);
  CHECK(back.documents == c.documents);
  fs::remove_all(dir);
}

TEST_CASE("metadata may not shadow fixed columns") {
  Corpus c = SmallCorpus();
  c.documents[0].metadata["body"] = "x";
  CHECK_THROWS_AS(CorpusCsv(c), Error);
}

TEST_CASE("guids are deterministic and well formed") {
  const auto g = MakeGuid(7, "code", 0);
  CHECK(IsGuid(g));
  CHECK(g[14] == '4');
  CHECK(std::string("89ab").find(g[19]) != std::string::npos);
  CHECK(g == MakeGuid(7, "code", 0));
  CHECK(g != MakeGuid(7, "code", 1));
  CHECK(g != MakeGuid(7, "source", 0));
  CHECK(g != MakeGuid(8, "code", 0));
  CHECK_FALSE(IsGuid("not-a-guid"));
  std::set<std::string> many;
  for (int i = 0; i < 1000; ++i) many.insert(MakeGuid(1, "selection", i));
  CHECK(many.size() == 1000);
}

TEST_CASE("empty project") {
  QdpxProject p;
  p.name = "empty";
  const auto bytes = QdpxArchive(p);
  const auto entries = zip::Read(bytes);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].name == "project.qde");
  const auto root = xml::Parse(entries[0].data);
  CHECK(root.name == "Project");
  CHECK(root.Child("CodeBook")->Child("Codes")->children.empty());
  const auto back = ParseQdpxArchive(bytes);
  CHECK(back.project == p);
  CHECK(back.warnings.empty());
}

QdpxProject OneSelection() {
  QdpxProject p;
  p.name = "one";
  p.codes = {{MakeGuid(1, "code", 0), "finance"}};
  p.sources = {{MakeGuid(1, "source", 0), "doc-1", "Climate finance <now> & then"}};
  p.selections = {{p.sources[0].guid, 8, 15, p.codes[0].guid}};
  return p;
}

TEST_CASE("one source with one selection") {
  const auto p = OneSelection();
  const auto back = ParseQdpxArchive(QdpxArchive(p));
  CHECK(back.project == p);
  const auto &sel = back.project.selections[0];
  CHECK(text::Slice(back.project.sources[0].text, sel.start, sel.end) ==
        "finance");
}

QdpxProject ThreeSources() {
  QdpxProject p;
  p.name = "Three \"sources\" & <markup>";
  for (int i = 0; i < 3; ++i) {
    p.codes.push_back({MakeGuid(5, "code", i), "code\t" + std::to_string(i)});
  }
  p.sources = {
      {MakeGuid(5, "source", 0), "s0", "Plain ASCII text about funds."},
      {MakeGuid(5, "source", 1), "s1",
       "Gr\xC3\xBC\xC3\x9F" "e aus K\xC3\xB6ln \xF0\x9F\x8C\x8D, \"quoted\"\r\n"
       "second\tline  with  spaces "},
      {MakeGuid(5, "source", 2), "s2", "  leading and trailing whitespace\n\n"}};
  const std::size_t len1 = text::ScalarLength(p.sources[1].text);
  p.selections = {
      {p.sources[0].guid, 0, 5, p.codes[0].guid},
      {p.sources[0].guid, 0, 5, p.codes[1].guid},
      {p.sources[0].guid, 23, 28, p.codes[2].guid},
      {p.sources[1].guid, 0, 5, p.codes[0].guid},
      {p.sources[1].guid, 15, 16, p.codes[1].guid},
      {p.sources[1].guid, 0, len1, p.codes[2].guid},
      {p.sources[2].guid, 2, 9, p.codes[0].guid}};
  p.SortSelections();
  return p;
}

TEST_CASE("three sources with seven selections round trip") {
  const auto p = ThreeSources();
  REQUIRE(p.selections.size() == 7);
  const auto dir = TempDir("cmwb_qdpx");
  ExportQdpx(p, dir / "p.qdpx");
  const auto back = ImportQdpx(dir / "p.qdpx");
  CHECK(back.warnings.empty());
  CHECK(back.project.name == p.name);
  CHECK(back.project.codes == p.codes);
  CHECK(back.project.sources == p.sources);
  CHECK(back.project.selections == p.selections);
  CHECK(back.project == p);
  // The emoji counts as one scalar value, so offset 15 is the emoji itself.
  CHECK(text::Slice(back.project.sources[1].text, 15, 16) ==
        "\xF0\x9F\x8C\x8D");
  ExportQdpx(back.project, dir / "again.qdpx");
  CHECK(ReadFile(dir / "p.qdpx") == ReadFile(dir / "again.qdpx"));
  fs::remove_all(dir);
}

TEST_CASE("archive layout is fixed") {
  const auto p = ThreeSources();
  const auto entries = zip::Read(QdpxArchive(p));
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].name == "project.qde");
  std::vector<std::string> names;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    names.push_back(entries[i].name);
  }
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const auto &s : p.sources) {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](auto &e) {
      return e.name == "sources/" + s.guid + ".txt";
    });
    REQUIRE(it != entries.end());
    CHECK(it->data == s.text);
  }
  CHECK(QdpxArchive(p) == QdpxArchive(p));
}

TEST_CASE("invariant violations name the guid") {
  auto p = OneSelection();
  p.selections[0].end = 1000;
  CHECK_THROWS_WITH_AS(QdpxArchive(p), doctest::Contains(p.sources[0].guid.c_str()),
                       Error);
  p = OneSelection();
  p.selections[0].code_guid = MakeGuid(9, "code", 9);
  CHECK_THROWS_WITH_AS(QdpxArchive(p),
                       doctest::Contains(p.selections[0].code_guid.c_str()), Error);
  p = OneSelection();
  p.codes.push_back({p.sources[0].guid, "clash"});
  CHECK_THROWS_WITH_AS(QdpxArchive(p), doctest::Contains(p.sources[0].guid.c_str()),
                       Error);
  p = OneSelection();
  p.codes[0].guid = "1234";
  CHECK_THROWS_WITH_AS(QdpxArchive(p), doctest::Contains("1234"), Error);
}

TEST_CASE("a zip without project.qde is rejected") {
  CHECK_THROWS_WITH_AS(ImportQdpx(kFixtures + "/no_project.qdpx"),
                       "missing project.qde", Error);
}

TEST_CASE("hand-built fixture parses to its literal values") {
  const auto r = ImportQdpx(kFixtures + "/minimal.qdpx");
  const auto &p = r.project;
  CHECK(p.name == "Fixture study");
  REQUIRE(p.codes.size() == 2);
  CHECK(p.codes[0] == QdpxCode{"0C1D2E3F-4A5B-4C6D-8E7F-0000000000C1",
                               "Finance & support"});
  CHECK(p.codes[1] == QdpxCode{"0C1D2E3F-4A5B-4C6D-8E7F-0000000000C2",
                               "Loans"});
  REQUIRE(p.sources.size() == 2);
  CHECK(p.sources[0].guid == "0C1D2E3F-4A5B-4C6D-8E7F-0000000000A1");
  CHECK(p.sources[0].document_id == "gambia-2015");
  CHECK(p.sources[0].text == "The Gambia seeks funds.");
  CHECK(p.sources[1].document_id == "k\xC3\xB6ln-2016");
  CHECK(p.sources[1].text == "K\xC3\xB6ln f\xC3\xB6rdert Kredite.");
  REQUIRE(p.selections.size() == 2);
  CHECK(p.selections[0] ==
        QdpxSelection{"0C1D2E3F-4A5B-4C6D-8E7F-0000000000A1", 4, 10,
                      "0C1D2E3F-4A5B-4C6D-8E7F-0000000000C1"});
  CHECK(p.selections[1] ==
        QdpxSelection{"0C1D2E3F-4A5B-4C6D-8E7F-0000000000A2", 13, 20,
                      "0C1D2E3F-4A5B-4C6D-8E7F-0000000000C2"});
  CHECK(text::Slice(p.sources[1].text, 13, 20) == "Kredite");
  // Users, Description and Notes are outside the subset; one selection has
  // offsets beyond its source.
  CHECK(r.warnings.size() == 4);
  bool rejected = false;
  for (const auto &w : r.warnings) {
    rejected |= w.find("0C1D2E3F-4A5B-4C6D-8E7F-0000000000E2") !=
                std::string::npos;
  }
  CHECK(rejected);
}

std::string ArchiveWith(const std::string &qde) {
  return zip::Write({{"project.qde", qde}});
}

TEST_CASE("dangling code references are fatal") {
  const std::string qde =
      "<Project name=\"x\"><CodeBook><Codes/></CodeBook><Sources>"
      "<TextSource guid=\"00000000-0000-4000-8000-000000000001\" name=\"d\">"
      "<PlainTextContent>abc</PlainTextContent>"
      "<PlainTextSelection guid=\"00000000-0000-4000-8000-000000000002\" "
      "startPosition=\"0\" endPosition=\"1\"><Coding guid=\"00000000-0000-"
      "4000-8000-000000000003\"><CodeRef targetGUID=\"00000000-0000-4000-8000-"
      "000000000009\"/></Coding></PlainTextSelection></TextSource></Sources>"
      "</Project>";
  CHECK_THROWS_WITH_AS(ParseQdpxArchive(ArchiveWith(qde)),
                       doctest::Contains("dangling CodeRef"), Error);
}

TEST_CASE("malformed xml is reported") {
  CHECK_THROWS_WITH_AS(ParseQdpxArchive(ArchiveWith("<Project><CodeBook>")),
                       doctest::Contains("malformed XML"), Error);
}

TEST_CASE("labels become whole-document selections") {
  auto study = synth::NdcStyleCorpus(1, 2);
  Corpus c;
  c.documents = study.documents;
  Codebook cb;
  cb.codes = {{"finance", "Finance", ""}, {"adaptation", "Adaptation", ""}};
  const LabelMap labels = {{c.documents[0].id, "finance"},
                           {c.documents[3].id, "adaptation"}};
  const auto p = ProjectFromLabels("study", c, cb, labels, 42);
  CHECK(p.sources.size() == c.documents.size());
  REQUIRE(p.selections.size() == 2);
  CHECK(p.selections[0].end == text::ScalarLength(c.documents[0].body));
  CHECK(ParseQdpxArchive(QdpxArchive(p)).project == p);
  CHECK(QdpxArchive(ProjectFromLabels("study", c, cb, labels, 42)) ==
        QdpxArchive(p));
  CHECK_THROWS_AS(
      ProjectFromLabels("s", c, cb, {{c.documents[0].id, "nope"}}, 1), Error);
}

TEST_CASE("theta export shape and precision") {
  TopicModel m;
  m.config = LdaConfig::Defaults(3);
  m.doc_ids = {"x", "y"};
  m.terms = {"a", "b"};
  m.theta = Matrix<double>(2, 3, 0.0);
  m.phi = Matrix<double>(3, 2, 0.5);
  const double values[2][3] = {{0.123456789123, 0.5, 0.376543210877},
                               {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  for (int d = 0; d < 2; ++d) {
    for (int k = 0; k < 3; ++k) m.theta(d, k) = values[d][k];
  }
  const auto dir = TempDir("cmwb_theta");
  ExportTopicsCsv(m, dir);
  const auto rows = csv::Parse(ReadFile(dir / "theta.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == csv::Row{"doc_id", "topic_0", "topic_1", "topic_2"});
  for (int d = 0; d < 2; ++d) {
    REQUIRE(rows[d + 1].size() == 4);
    for (int k = 0; k < 3; ++k) {
      const double back = std::stod(rows[d + 1][k + 1]);
      CHECK(csv::FormatSignificant(back, 9) ==
            csv::FormatSignificant(values[d][k], 9));
      CHECK(std::abs(back - values[d][k]) <= 5e-9 * std::abs(values[d][k]));
    }
  }
  CHECK(csv::Parse(ReadFile(dir / "phi.csv")).size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("labels export has one row per labeled document") {
  Codebook cb;
  cb.codes = {{"a", "A", ""}, {"b", "B", ""}};
  CodingSession s(cb, {"d1", "d2", "d3", "d4"}, Strategy::kEntropy, 1);
  s.RecordLabel("d3", "a");
  s.RecordLabel("d1", "b");
  s.RecordLabel("d4", "a");
  const auto dir = TempDir("cmwb_labels");
  ExportLabelsCsv(s, dir / "labels.csv");
  const auto rows = csv::Parse(ReadFile(dir / "labels.csv"));
  CHECK(rows.size() - 1 == s.labeled().size());
  fs::remove_all(dir);
}

TEST_CASE("zip reader handles deflate and rejects corruption") {
  const auto bytes = ReadFile(kFixtures + "/minimal.qdpx");
  CHECK(zip::Read(bytes).size() == 2);
  std::string broken = zip::Write({{"a.txt", "hello"}});
  broken[30 + 5] = 'j';  // first data byte
  CHECK_THROWS_WITH_AS(zip::Read(broken), doctest::Contains("CRC"), Error);
  CHECK_THROWS_AS(zip::Read("not a zip at all, definitely not"), Error);
}

}  // namespace
}  // namespace cmwb
