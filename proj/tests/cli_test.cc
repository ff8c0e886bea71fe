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

#include "cmwb/cli.h"

#include <sstream>

#include "cmwb/csv.h"
#include "cmwb/fileutil.h"
#include "cmwb/interchange.h"
#include "cmwb/service.h"
#include "cmwb/synth.h"
#include "doctest.h"
#include "json.hpp"
#include "test_util.h"

namespace cmwb::cli {
namespace {

using nlohmann::json;
using testing::TempDir;
using testing::TestData;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run Cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = Execute(args, out, err);
  return {code, out.str(), err.str()};
}

// Writes the two-topic corpus as CSV and imports it into <dir>/corpus.
std::string ImportTwoTopic(const TempDir &dir) {
  Corpus corpus;
  corpus.documents = synth::TwoTopicCorpus(5, 16, 40).documents;
  corpus.RefreshSchema();
  const auto csv = dir / "docs.csv";
  WriteFileAtomic(csv, CorpusCsv(corpus));
  const std::string out = (dir / "corpus").string();
  REQUIRE(Cmd({"import", "--input", csv.string(), "--format", "corpus-csv",
               "--out", out})
              .code == kExitOk);
  return out;
}

TEST_CASE("no arguments is a usage error") {
  const auto r = Cmd({});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("Usage:") != std::string::npos);
}

TEST_CASE("unknown flags and subcommands are usage errors") {
  CHECK(Cmd({"frobnicate"}).code == kExitUsage);
  CHECK(Cmd({"lda", "--bogus"}).code == kExitUsage);
  CHECK(Cmd({"topics"}).code == kExitUsage);
}

TEST_CASE("every subcommand prints help") {
  const std::vector<std::vector<std::string>> commands = {
      {},
      {"import"},
      {"dedup"},
      {"freq"},
      {"cooc"},
      {"lda"},
      {"topics"},
      {"topics", "show"},
      {"topics", "label"},
      {"topics", "filter"},
      {"topics", "by-meta"},
      {"topics", "coherence"},
      {"topics", "highlight"},
      {"classify"},
      {"classify", "train"},
      {"classify", "eval"},
      {"classify", "simulate"},
      {"export"},
      {"export", "corpus-csv"},
      {"export", "qdpx"},
      {"export", "topics"},
      {"export", "labels"},
      {"serve"}};
  for (auto args : commands) {
    args.push_back("--help");
    const auto r = Cmd(args);
    INFO(args.size());
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("Usage:") != std::string::npos);
  }
}

TEST_CASE("cooc over the eight-sentence fixture matches the golden file") {
  TempDir dir;
  const std::string corpus = (dir / "corpus").string();
  REQUIRE(Cmd({"import", "--input",
               TestData("fixtures/eight_sentences.csv").string(), "--out",
               corpus})
              .code == kExitOk);
  const auto r = Cmd({"cooc", "--corpus", corpus, "--measure", "dice",
                      "--min-count", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == ReadFile(TestData("golden/cooc_dice_sentence.csv")));
}

TEST_CASE("a single topic gives every document theta 1") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const std::string model = (dir / "model").string();
  const auto r = Cmd({"lda", "--corpus", corpus, "--k", "1", "--seed", "7",
                      "--iterations", "20", "--burn-in", "5", "--out", model});
  REQUIRE(r.code == kExitOk);
  CHECK(r.err.find("seed: 7") != std::string::npos);
  const auto rows = csv::Parse(ReadFile(std::filesystem::path(model) /
                                        "theta.csv"));
  REQUIRE(rows.size() == 17);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][1]) == 1.0);
  }
}

TEST_CASE("the default seed is echoed") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const auto r = Cmd({"--dry-run", "lda", "--corpus", corpus, "--k", "2",
                      "--out", (dir / "m").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("seed: 1") != std::string::npos);
  const json plan = json::parse(r.out);
  CHECK(plan["subcommand"] == "lda");
  CHECK(plan["seed"] == 1);
  CHECK(plan["params"]["alpha"] == doctest::Approx(25.0));
  CHECK(plan["inputs"]["corpus"] ==
        std::filesystem::absolute(corpus).string());
  CHECK_FALSE(std::filesystem::exists(dir / "m"));
}

TEST_CASE("invalid parameter values are usage errors naming each field") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const auto r = Cmd({"cooc", "--corpus", corpus, "--min-char", "9",
                      "--max-char", "3"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("analysis.min_char") != std::string::npos);
  CHECK(r.err.find("analysis.max_char") != std::string::npos);
}

TEST_CASE("runtime failures exit 1") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const auto r = Cmd({"topics", "show", "--model", corpus});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.starts_with("error: "));
}

TEST_CASE("a config file presets flags and the command line wins") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const auto config = dir / "cm.toml";
  WriteFileAtomic(config, "[lda]\nk = 4\nseed = 9\n");
  const auto r =
      Cmd({"--config", config.string(), "--dry-run", "lda", "--corpus", corpus,
           "--k", "3", "--out", (dir / "m").string()});
  REQUIRE(r.code == kExitOk);
  const json plan = json::parse(r.out);
  CHECK(plan["params"]["k"] == 3);
  CHECK(plan["seed"] == 9);
}

TEST_CASE("topic selection by label and by term") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const std::string model = (dir / "model").string();
  REQUIRE(Cmd({"lda", "--corpus", corpus, "--k", "2", "--iterations", "200",
               "--burn-in", "50", "--alpha", "0.1", "--out", model})
              .code == kExitOk);
  const std::string term = synth::TwoTopicCorpus(5, 16, 40).topic_words[0][0];
  auto r = Cmd({"topics", "label", "--model", model, "--topic-of", term,
                "--label", "First", "--json"});
  REQUIRE(r.code == kExitOk);
  const int k = json::parse(r.out)["topic"];
  r = Cmd({"topics", "filter", "--model", model, "--topic-label", "First",
           "--json"});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["topic"] == k);
  CHECK(Cmd({"topics", "filter", "--model", model, "--topic-label", "Nope"})
            .code == kExitFailure);
  CHECK(Cmd({"topics", "filter", "--model", model}).code == kExitUsage);
  CHECK(Cmd({"topics", "filter", "--model", model, "--topic", "0",
             "--topic-label", "First"})
            .code == kExitUsage);
}

TEST_CASE("command line and service write identical bytes") {
  TempDir dir;
  const std::string corpus = ImportTwoTopic(dir);
  const std::string model = (dir / "model").string();
  REQUIRE(Cmd({"lda", "--corpus", corpus, "--k", "2", "--iterations", "60",
               "--burn-in", "10", "--seed", "4", "--out", model})
              .code == kExitOk);
  const auto cooc = Cmd({"cooc", "--corpus", corpus, "--measure", "pmi"});
  REQUIRE(cooc.code == kExitOk);

  service::Service svc({dir / "data", 2, service::SystemClock});
  svc.Handle("POST", "/projects", {}, R"({"name":"x"})");
  const json import = {
      {"format", "corpus_csv"},
      {"data", ReadFile(dir / "docs.csv")}};
  svc.Handle("POST", "/projects/p1/import", {}, import.dump());
  svc.WaitIdle();
  svc.Handle("POST", "/projects/p1/jobs", {},
             R"({"kind":"lda","params":{"k":2,"iterations":60,"burn_in":10,)"
             R"("seed":4}})");
  svc.Handle("POST", "/projects/p1/jobs", {},
             R"({"kind":"cooc","params":{"measure":"pmi"}})");
  svc.WaitIdle();
  for (const char *file : {"theta.csv", "phi.csv"}) {
    const auto r = svc.Handle(
        "GET", std::string("/projects/p1/results/j2/files/") + file, {}, "");
    CHECK(r.status == 200);
    CHECK(r.body == ReadFile(std::filesystem::path(model) / file));
  }
  const auto pairs =
      svc.Handle("GET", "/projects/p1/results/j3/files/pairs.csv", {}, "");
  CHECK(pairs.body == cooc.out);
}

TEST_CASE("classify and export round trip") {
  TempDir dir;
  const auto sep = synth::SeparableCorpus(3, 60, 2);
  Corpus corpus;
  corpus.documents = sep.documents;
  corpus.RefreshSchema();
  WriteFileAtomic(dir / "docs.csv", CorpusCsv(corpus));
  std::string labels = "doc_id,code_id\n";
  for (const auto &[doc, code] : sep.gold) labels += doc + "," + code + "\n";
  WriteFileAtomic(dir / "labels.csv", labels);
  const std::string c = (dir / "corpus").string();
  REQUIRE(Cmd({"import", "--input", (dir / "docs.csv").string(), "--format",
               "corpus-csv", "--out", c})
              .code == kExitOk);
  auto r = Cmd({"classify", "eval", "--corpus", c, "--labels",
                (dir / "labels.csv").string(), "--folds", "3", "--json"});
  REQUIRE(r.code == kExitOk);
  const json report = json::parse(r.out);
  int total = 0;
  for (const auto &row : report["confusion"]) {
    for (const auto &n : row) total += n.get<int>();
  }
  CHECK(total == 60);
  r = Cmd({"classify", "simulate", "--corpus", c, "--labels",
           (dir / "labels.csv").string(), "--budget", "5", "--json"});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["points"].get<int>() > 0);
  r = Cmd({"export", "qdpx", "--corpus", c, "--labels",
           (dir / "labels.csv").string(), "--out",
           (dir / "p.qdpx").string()});
  REQUIRE(r.code == kExitOk);
  const auto imported = ImportQdpx(dir / "p.qdpx");
  CHECK(imported.project.sources.size() == 60);
  CHECK(imported.project.selections.size() == 60);
  r = Cmd({"export", "corpus-csv", "--corpus", c, "--out",
           (dir / "out.csv").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(ReadFile(dir / "out.csv") == ReadFile(dir / "docs.csv"));
}

}  // namespace
}  // namespace cmwb::cli
