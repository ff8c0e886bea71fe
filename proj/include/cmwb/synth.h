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

#ifndef CMWB_SYNTH_H_
#define CMWB_SYNTH_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmwb/classify.h"
#include "cmwb/corpus.h"

// Seeded generators for the synthetic corpora used by tests, the acceptance
// runner and the walkthrough. Every generated word is a plain lowercase
// ASCII term that survives the default pipeline filters.
namespace cmwb::synth {

struct TopicCorpus {
  std::vector<Document> documents;
  std::vector<std::vector<std::string>> topic_words;  // disjoint word lists
  std::map<std::string, int> word_topic;              // generating topic
  std::vector<int> dominant_topic;                    // per document
};

// `docs` documents over two disjoint ten-word vocabularies. Each document
// draws `length` tokens, a share `purity` of them from its dominant topic
// and the rest from the other.
TopicCorpus TwoTopicCorpus(std::uint64_t seed, int docs = 40, int length = 60,
                           double purity = 0.8);

struct LabeledCorpus {
  std::vector<Document> documents;
  Codebook codebook;
  LabelMap gold;
};

// Separable classification corpus: each document mixes shared noise words
// with a few words specific to its class, so several labels are needed
// before a classifier generalizes.
LabeledCorpus SeparableCorpus(std::uint64_t seed, int docs = 200,
                              int classes = 2);

struct StudyCorpus {
  std::vector<Document> documents;
  std::string gazetteer;  // "surface<TAB>kind" lines
  int finance_topic = 0;     // planted topic of the Annex-1 group
  int adaptation_topic = 1;  // planted topic of the Non-Annex group
};

// NDC-style study corpus: ten disjoint topic vocabularies, a shared pool of
// country names tagged by the gazetteer, and an "annex" metadata field set to
// "Annex-1" on finance documents and "Non-Annex" on adaptation documents.
StudyCorpus NdcStyleCorpus(std::uint64_t seed, int docs_per_topic = 12);

// Topic vocabularies used by NdcStyleCorpus, in topic order.
const std::vector<std::vector<std::string>> &NdcTopicWords();

}  // namespace cmwb::synth

#endif  // CMWB_SYNTH_H_
