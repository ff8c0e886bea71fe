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

#ifndef CMWB_PIPELINE_H_
#define CMWB_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmwb/corpus.h"
#include "cmwb/error.h"
#include "cmwb/text.h"
#include "json.hpp"

namespace cmwb {

// The preprocessing surface. Defaults: unigrams, words of 2..50 characters,
// lowercase, English stopwords and numbers removed, no pruning.
struct AnalysisParams {
  int ngram = 1;
  int min_char = 2;
  int max_char = 50;
  bool lowercase = true;
  bool remove_stopwords = true;
  std::string stopword_language = "en";
  bool remove_numbers = true;
  std::set<std::string> blacklist;
  std::optional<std::set<std::string>> whitelist;
  double prune_min_df = 0.0;
  double prune_max_df = 1.0;
  bool consolidate_entities = false;

  bool operator==(const AnalysisParams &) const = default;

  // Every violated constraint, addressed relative to `prefix`.
  std::vector<FieldError> Validate(const std::string &prefix = "") const;

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults. Throws ValidationError on wrong types
  // or violated constraints.
  static AnalysisParams FromJson(const nlohmann::json &j,
                                 const std::string &prefix = "");
};

// Newline-delimited UTF-8 term list; blank lines and '#' comments skipped.
std::set<std::string> ParseTermList(std::string_view data);
std::set<std::string> LoadTermList(const std::filesystem::path &path);

// Built-in stopword lists ("en", "de"), lowercased.
const std::set<std::string> &Stopwords(std::string_view language);
std::vector<std::string> StopwordLanguages();

struct Token {
  text::Span span;
  std::string surface;
};

// Whitespace split with punctuation trimming; spans index the original body.
// With ngram == 2 each adjacent pair "a_b" is emitted right after its first
// word, spanning both. Output is ordered by (start, end).
std::vector<Token> Tokenize(std::string_view body, const AnalysisParams &params);

// As Tokenize, but with consolidate_entities set, the words covered by a
// multi-word entity span are merged into one '_'-joined token first.
std::vector<Token> TokenizeDocument(const Document &doc,
                                    const AnalysisParams &params);

struct Vocabulary {
  std::vector<std::string> terms;  // index -> term, lexicographic order
  std::vector<int> df;             // per-term document frequency
  int num_docs = 0;
  AnalysisParams params;

  int size() const { return static_cast<int>(terms.size()); }
  std::optional<int> Find(std::string_view term) const;

 private:
  friend Vocabulary BuildVocabulary(const std::vector<Document> &,
                                    const AnalysisParams &);
  friend Vocabulary RestoreVocabulary(std::vector<std::string>,
                                      std::vector<int>, int, AnalysisParams);
  void Reindex();
  std::unordered_map<std::string, int> index_;
};

// Filters apply in a fixed order: length, numbers, stopwords, blacklist,
// whitelist, document-frequency pruning. List matching is case-insensitive.
// Throws cmwb::Error when nothing survives.
Vocabulary BuildVocabulary(const std::vector<Document> &corpus,
                           const AnalysisParams &params);

// Rebuilds a vocabulary from persisted parts (terms must be sorted, unique).
Vocabulary RestoreVocabulary(std::vector<std::string> terms,
                             std::vector<int> df, int num_docs,
                             AnalysisParams params);

// True when `term` consists only of digits, '.' and ','.
bool IsNumberTerm(std::u32string_view term);

inline constexpr int kFiltered = -1;

struct StreamEntry {
  text::Span span;
  int term = kFiltered;
};

struct DocRow {
  std::string doc_id;
  std::vector<std::pair<int, int>> counts;  // (term, count), term ascending
  std::vector<StreamEntry> stream;

  int Length() const;  // number of non-filtered stream entries
};

struct DocTermMatrix {
  std::vector<DocRow> rows;
  int vocab_size = 0;

  const DocRow *Find(std::string_view doc_id) const;
  std::size_t RowIndex(std::string_view doc_id) const;  // throws NotFound
};

DocTermMatrix BuildDtm(const std::vector<Document> &corpus,
                       const Vocabulary &vocab);

// Lowercased words of every entity span whose kind is in `kinds`; a
// multi-word surface also contributes its '_'-joined form.
std::set<std::string> BlacklistFromEntities(const std::vector<Document> &corpus,
                                            const std::set<EntityKind> &kinds);

}  // namespace cmwb

#endif  // CMWB_PIPELINE_H_
