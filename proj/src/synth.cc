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

#include "cmwb/synth.h"

#include <cctype>
#include <cstdio>

#include "cmwb/rng.h"

namespace cmwb::synth {

namespace {

std::string Id(const char *prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03d", prefix, i);
  return buf;
}

const std::vector<std::string> &Pick(
    const std::vector<std::vector<std::string>> &lists, int i) {
  return lists[static_cast<std::size_t>(i)];
}

std::string Draw(Rng *rng, const std::vector<std::string> &words) {
  return words[rng->Below(words.size())];
}

}  // namespace

TopicCorpus TwoTopicCorpus(std::uint64_t seed, int docs, int length,
                           double purity) {
  TopicCorpus out;
  out.topic_words = {
      {"fund", "finance", "budget", "money", "loan", "grant", "credit", "bank",
       "donor", "capital"},
      {"water", "flood", "river", "rain", "drought", "coast", "storm", "ocean",
       "glacier", "wetland"}};
  for (int k = 0; k < 2; ++k) {
    for (const auto &w : Pick(out.topic_words, k)) out.word_topic[w] = k;
  }
  Rng rng(seed);
  for (int d = 0; d < docs; ++d) {
    const int dominant = d % 2;
    std::string body;
    for (int t = 0; t < length; ++t) {
      const int k = rng.Uniform() < purity ? dominant : 1 - dominant;
      if (!body.empty()) body += ' ';
      body += Draw(&rng, Pick(out.topic_words, k));
    }
    Document doc;
    doc.id = Id("doc", d);
    doc.title = "Synthetic document " + std::to_string(d);
    doc.body = std::move(body);
    out.documents.push_back(std::move(doc));
    out.dominant_topic.push_back(dominant);
  }
  return out;
}

LabeledCorpus SeparableCorpus(std::uint64_t seed, int docs, int classes) {
  static const std::vector<std::string> kNoise = {
      "report",  "section", "country", "national", "plan",    "measure",
      "policy",  "sector",  "target",  "period",   "process", "support",
      "level",   "action",  "system",  "program",  "review",  "priority",
      "context", "strategy"};
  static const std::vector<std::vector<std::string>> kClassWords = {
      {"emission", "carbon", "methane", "energy", "solar", "wind", "fuel",
       "electricity", "transport", "efficiency"},
      {"resilience", "drought", "flood", "irrigation", "coastal", "harvest",
       "rainfall", "heatwave", "storm", "vulnerability"},
      {"finance", "fund", "loan", "grant", "budget", "investment", "donor",
       "credit", "bond", "subsidy"},
      {"forest", "soil", "wetland", "species", "habitat", "biodiversity",
       "mangrove", "peatland", "reef", "pollinator"}};
  LabeledCorpus out;
  static const char *kCodeIds[] = {"mitigation", "adaptation", "finance",
                                   "nature"};
  for (int c = 0; c < classes && c < 4; ++c) {
    out.codebook.codes.push_back({kCodeIds[c], kCodeIds[c], ""});
  }
  Rng rng(seed);
  for (int d = 0; d < docs; ++d) {
    const int c = d % static_cast<int>(out.codebook.codes.size());
    std::vector<std::string> words;
    for (int t = 0; t < 16; ++t) words.push_back(Draw(&rng, kNoise));
    const int signal = 1 + static_cast<int>(rng.Below(2));
    for (int t = 0; t < signal; ++t) {
      words.push_back(Draw(&rng, Pick(kClassWords, c)));
    }
    rng.Shuffle(&words);
    Document doc;
    doc.id = Id("d", d);
    for (const auto &w : words) {
      if (!doc.body.empty()) doc.body += ' ';
      doc.body += w;
    }
    out.gold[doc.id] = out.codebook.codes[static_cast<std::size_t>(c)].id;
    out.documents.push_back(std::move(doc));
  }
  return out;
}

const std::vector<std::vector<std::string>> &NdcTopicWords() {
  static const std::vector<std::vector<std::string>> kTopics = {
      {"financial", "fund", "funds", "financing", "required", "support",
       "investment", "donor"},
      {"adaptation", "drought", "resilience", "irrigation", "vulnerable",
       "rainfall", "harvest", "coastal"},
      {"emissions", "reduction", "baseline", "scenario", "inventory",
       "methane", "gases", "tonnes"},
      {"energy", "renewable", "solar", "wind", "electricity", "grid",
       "hydropower", "efficiency"},
      {"forest", "forestry", "deforestation", "land", "soil", "trees",
       "reforestation", "carbon"},
      {"transport", "vehicles", "fuel", "roads", "railway", "urban",
       "mobility", "freight"},
      {"agriculture", "livestock", "crops", "farmers", "fertilizer", "cattle",
       "yields", "rice"},
      {"waste", "landfill", "recycling", "wastewater", "sanitation",
       "composting", "municipal", "disposal"},
      {"health", "disease", "malaria", "heat", "hospitals", "nutrition",
       "outbreaks", "clinics"},
      {"technology", "transfer", "capacity", "training", "institutions",
       "research", "innovation", "knowledge"}};
  return kTopics;
}

StudyCorpus NdcStyleCorpus(std::uint64_t seed, int docs_per_topic) {
  static const std::vector<std::string> kCountries = {
      "Gambia", "Kenya", "Peru", "Norway", "Germany", "Japan",
      "Chile",  "Nepal", "Fiji", "Canada", "Morocco", "Vietnam"};
  StudyCorpus out;
  for (const auto &c : kCountries) out.gazetteer += c + "\tLOCATION\n";
  out.gazetteer += "New Zealand\tLOCATION\n";
  const auto &topics = NdcTopicWords();
  Rng rng(seed);
  int n = 0;
  for (int k = 0; k < static_cast<int>(topics.size()); ++k) {
    for (int i = 0; i < docs_per_topic; ++i, ++n) {
      const std::string country = Draw(&rng, kCountries);
      std::string body = country + " submits this contribution.";
      for (int s = 0; s < 6; ++s) {
        body += ' ';
        std::string sentence;
        for (int t = 0; t < 8; ++t) {
          // Country names recur inside the text so that only the blacklist
          // keeps them out of the topics.
          const double u = rng.Uniform();
          std::string w = u < 0.15 ? Draw(&rng, kCountries)
                                   : Draw(&rng, Pick(topics, k));
          if (sentence.empty()) w[0] = static_cast<char>(std::toupper(w[0]));
          if (!sentence.empty()) sentence += ' ';
          sentence += w;
        }
        body += sentence + ".";
      }
      Document doc;
      doc.id = Id("ndc", n);
      doc.title = country + " NDC";
      doc.body = std::move(body);
      doc.date = Date{2015 + static_cast<int>(rng.Below(6)), 1 + i % 12, 1};
      doc.metadata["country"] = country;
      if (k == out.finance_topic) doc.metadata["annex"] = "Annex-1";
      if (k == out.adaptation_topic) doc.metadata["annex"] = "Non-Annex";
      out.documents.push_back(std::move(doc));
    }
  }
  return out;
}

}  // namespace cmwb::synth
