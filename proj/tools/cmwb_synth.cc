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

// Writes the seeded synthetic corpora as CSV files that `cmwb import` reads.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "cmwb/csv.h"
#include "cmwb/fileutil.h"
#include "cmwb/synth.h"

namespace {

namespace fs = std::filesystem;

// id,title,date,body plus one column per metadata field, sorted by name.
std::string DocumentsCsv(const std::vector<cmwb::Document> &docs) {
  std::set<std::string> fields;
  for (const auto &d : docs) {
    for (const auto &[k, v] : d.metadata) fields.insert(k);
  }
  cmwb::csv::Row header = {"id", "title", "date", "body"};
  header.insert(header.end(), fields.begin(), fields.end());
  std::string out = cmwb::csv::FormatRow(header);
  for (const auto &d : docs) {
    cmwb::csv::Row row = {d.id, d.title, d.date ? d.date->ToString() : "",
                          d.body};
    for (const auto &f : fields) {
      auto it = d.metadata.find(f);
      row.push_back(it == d.metadata.end() ? "" : it->second);
    }
    out += cmwb::csv::FormatRow(row);
  }
  return out;
}

std::string LabelsCsv(const cmwb::LabelMap &labels) {
  std::string out = cmwb::csv::FormatRow({"doc_id", "code_id"});
  for (const auto &[doc, code] : labels) {
    out += cmwb::csv::FormatRow({doc, code});
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app("Generate seeded synthetic corpora for cmwb", "cmwb-synth");
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  std::string out;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--out", out, "Output directory")->required();

  int per_topic = 12;
  auto *ndc = app.add_subcommand(
      "ndc", "Ten-topic policy corpus with an annex field and a gazetteer");
  ndc->add_option("--docs-per-topic", per_topic, "Documents per topic")
      ->capture_default_str();

  int docs = 40, length = 60;
  double purity = 0.8;
  auto *two = app.add_subcommand("two-topic", "Two disjoint topics");
  two->add_option("--docs", docs, "Documents")->capture_default_str();
  two->add_option("--length", length, "Tokens per document")
      ->capture_default_str();
  two->add_option("--purity", purity, "Share of the dominant topic")
      ->capture_default_str();

  int sep_docs = 200, classes = 2;
  auto *sep = app.add_subcommand("separable", "Labeled classification corpus");
  sep->add_option("--docs", sep_docs, "Documents")->capture_default_str();
  sep->add_option("--classes", classes, "Classes")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path dir(out);
    if (ndc->parsed()) {
      const auto c = cmwb::synth::NdcStyleCorpus(seed, per_topic);
      cmwb::WriteFileAtomic(dir / "documents.csv", DocumentsCsv(c.documents));
      cmwb::WriteFileAtomic(dir / "gazetteer.tsv", c.gazetteer);
    } else if (two->parsed()) {
      const auto c = cmwb::synth::TwoTopicCorpus(seed, docs, length, purity);
      cmwb::WriteFileAtomic(dir / "documents.csv", DocumentsCsv(c.documents));
    } else {
      const auto c = cmwb::synth::SeparableCorpus(seed, sep_docs, classes);
      cmwb::WriteFileAtomic(dir / "documents.csv", DocumentsCsv(c.documents));
      cmwb::WriteFileAtomic(dir / "labels.csv", LabelsCsv(c.gold));
      cmwb::WriteFileAtomic(dir / "codebook.json",
                            c.codebook.ToJson().dump(2) + "\n");
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
