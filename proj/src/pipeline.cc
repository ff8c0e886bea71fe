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

#include "cmwb/pipeline.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace cmwb {

namespace internal {
extern const std::string_view kStopwordsEn;
extern const std::string_view kStopwordsDe;
}  // namespace internal

namespace {

const char *const kParamKeys[] = {
    "ngram",         "min_char",          "max_char",
    "lowercase",     "remove_stopwords",  "stopword_language",
    "remove_numbers", "blacklist",        "whitelist",
    "prune_min_df",  "prune_max_df",      "consolidate_entities"};

std::set<std::string> Lowered(const std::set<std::string> &terms) {
  std::set<std::string> out;
  for (const auto &t : terms) out.insert(text::ToLower(t));
  return out;
}

}  // namespace

std::vector<FieldError> AnalysisParams::Validate(
    const std::string &prefix) const {
  std::vector<FieldError> errors;
  auto add = [&](const std::string &field, const std::string &msg) {
    errors.push_back({prefix + field, msg});
  };
  if (ngram != 1 && ngram != 2) add("ngram", "must be 1 or 2");
  if (min_char < 1) add("min_char", "must be at least 1");
  if (max_char < min_char) {
    add("min_char", "must not exceed max_char");
    add("max_char", "must be at least min_char");
  }
  if (!(prune_min_df >= 0.0 && prune_min_df < 1.0)) {
    add("prune_min_df", "must lie in [0, 1)");
  }
  if (!(prune_max_df > 0.0 && prune_max_df <= 1.0)) {
    add("prune_max_df", "must lie in (0, 1]");
  }
  if (!(prune_min_df < prune_max_df)) {
    add("prune_min_df", "must be below prune_max_df");
    add("prune_max_df", "must be above prune_min_df");
  }
  if (remove_stopwords) {
    const auto langs = StopwordLanguages();
    if (std::find(langs.begin(), langs.end(), stopword_language) ==
        langs.end()) {
      add("stopword_language", "no stopword list for '" + stopword_language +
                                   "'");
    }
  }
  return errors;
}

nlohmann::json AnalysisParams::ToJson() const {
  nlohmann::json j;
  j["ngram"] = ngram;
  j["min_char"] = min_char;
  j["max_char"] = max_char;
  j["lowercase"] = lowercase;
  j["remove_stopwords"] = remove_stopwords;
  j["stopword_language"] = stopword_language;
  j["remove_numbers"] = remove_numbers;
  j["blacklist"] = blacklist;
  j["whitelist"] = whitelist ? nlohmann::json(*whitelist) : nullptr;
  j["prune_min_df"] = prune_min_df;
  j["prune_max_df"] = prune_max_df;
  j["consolidate_entities"] = consolidate_entities;
  return j;
}

AnalysisParams AnalysisParams::FromJson(const nlohmann::json &j,
                                        const std::string &prefix) {
  AnalysisParams p;
  std::vector<FieldError> errors;
  if (!j.is_object()) {
    throw ValidationError(prefix.empty() ? "params" : prefix,
                            "must be an object");
  }
  for (const auto &[key, value] : j.items()) {
    if (std::find(std::begin(kParamKeys), std::end(kParamKeys), key) ==
        std::end(kParamKeys)) {
      errors.push_back({prefix + key, "unknown field"});
    }
  }
  auto read = [&](const char *key, auto *out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
      using T = std::remove_pointer_t<decltype(out)>;
      if constexpr (std::is_same_v<T, int>) {
        if (!it->is_number_integer()) throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::invalid_argument("");
      }
      *out = it->template get<T>();
    } catch (const std::exception &) {
      errors.push_back({prefix + key, "wrong type"});
    }
  };
  read("ngram", &p.ngram);
  read("min_char", &p.min_char);
  read("max_char", &p.max_char);
  read("lowercase", &p.lowercase);
  read("remove_stopwords", &p.remove_stopwords);
  read("stopword_language", &p.stopword_language);
  read("remove_numbers", &p.remove_numbers);
  read("blacklist", &p.blacklist);
  if (auto it = j.find("whitelist"); it != j.end() && !it->is_null()) {
    std::set<std::string> w;
    read("whitelist", &w);
    p.whitelist = std::move(w);
  }
  read("prune_min_df", &p.prune_min_df);
  read("prune_max_df", &p.prune_max_df);
  read("consolidate_entities", &p.consolidate_entities);
  if (errors.empty()) errors = p.Validate(prefix);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return p;
}

std::set<std::string> ParseTermList(std::string_view data) {
  std::set<std::string> terms;
  std::istringstream in{std::string(data)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    terms.insert(line.substr(first, last - first + 1));
  }
  return terms;
}

std::set<std::string> LoadTermList(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read term list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseTermList(ss.str());
}

const std::set<std::string> &Stopwords(std::string_view language) {
  static const std::set<std::string> en = ParseTermList(internal::kStopwordsEn);
  static const std::set<std::string> de = ParseTermList(internal::kStopwordsDe);
  if (language == "en") return en;
  if (language == "de") return de;
  throw Error("no stopword list for '" + std::string(language) + "'");
}

std::vector<std::string> StopwordLanguages() { return {"de", "en"}; }

namespace {

std::vector<Token> Unigrams(const std::u32string &body,
                            const AnalysisParams &params,
                            const std::vector<EntitySpan> *entities) {
  const auto words = text::SplitWords(body);
  std::vector<Token> tokens;
  tokens.reserve(words.size());
  auto surface_of = [&](text::Span s) {
    std::u32string piece = body.substr(s.start, s.length());
    if (params.lowercase) piece = text::ToLower(piece);
    return text::Encode(piece);
  };
  std::size_t w = 0;
  std::size_t e = 0;
  while (w < words.size()) {
    if (entities != nullptr) {
      while (e < entities->size() && (*entities)[e].end <= words[w].start) ++e;
      if (e < entities->size() && (*entities)[e].start <= words[w].start) {
        const auto &ent = (*entities)[e];
        std::size_t last = w;
        while (last + 1 < words.size() && words[last + 1].end <= ent.end) {
          ++last;
        }
        if (last > w && words[w].end <= ent.end) {
          Token merged{{words[w].start, words[last].end}, {}};
          for (std::size_t k = w; k <= last; ++k) {
            if (k > w) merged.surface.push_back('_');
            merged.surface += surface_of(words[k]);
          }
          tokens.push_back(std::move(merged));
          w = last + 1;
          continue;
        }
      }
    }
    tokens.push_back({words[w], surface_of(words[w])});
    ++w;
  }
  return tokens;
}

std::vector<Token> WithBigrams(std::vector<Token> unigrams) {
  std::vector<Token> out;
  out.reserve(unigrams.size() * 2);
  for (std::size_t i = 0; i < unigrams.size(); ++i) {
    out.push_back(unigrams[i]);
    if (i + 1 < unigrams.size()) {
      out.push_back({{unigrams[i].span.start, unigrams[i + 1].span.end},
                     unigrams[i].surface + "_" + unigrams[i + 1].surface});
    }
  }
  return out;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view body,
                            const AnalysisParams &params) {
  auto tokens = Unigrams(text::Decode(body), params, nullptr);
  return params.ngram == 2 ? WithBigrams(std::move(tokens)) : tokens;
}

std::vector<Token> TokenizeDocument(const Document &doc,
                                    const AnalysisParams &params) {
  std::vector<EntitySpan> entities;
  if (params.consolidate_entities) {
    entities = doc.entity_tags;
    std::sort(entities.begin(), entities.end(),
              [](const EntitySpan &a, const EntitySpan &b) {
                return a.start < b.start;
              });
  }
  auto tokens = Unigrams(text::Decode(doc.body), params,
                         params.consolidate_entities ? &entities : nullptr);
  return params.ngram == 2 ? WithBigrams(std::move(tokens)) : tokens;
}

bool IsNumberTerm(std::u32string_view term) {
  if (term.empty()) return false;
  return std::all_of(term.begin(), term.end(), [](char32_t c) {
    return text::IsDigit(c) || c == U'.' || c == U',';
  });
}

std::optional<int> Vocabulary::Find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::Reindex() {
  index_.clear();
  for (int i = 0; i < size(); ++i) index_.emplace(terms[i], i);
}

Vocabulary BuildVocabulary(const std::vector<Document> &corpus,
                           const AnalysisParams &params) {
  if (corpus.empty()) throw Error("corpus is empty");
  if (auto errors = params.Validate(); !errors.empty()) {
    throw ValidationError(std::move(errors));
  }
  std::map<std::string, int> df;
  for (const auto &doc : corpus) {
    std::set<std::string> seen;
    for (auto &tok : TokenizeDocument(doc, params)) {
      seen.insert(std::move(tok.surface));
    }
    for (const auto &t : seen) ++df[t];
  }

  const std::set<std::string> *stop =
      params.remove_stopwords ? &Stopwords(params.stopword_language) : nullptr;
  const auto blacklist = Lowered(params.blacklist);
  std::optional<std::set<std::string>> whitelist;
  if (params.whitelist) whitelist = Lowered(*params.whitelist);
  const double n = static_cast<double>(corpus.size());

  Vocabulary vocab;
  vocab.params = params;
  vocab.num_docs = static_cast<int>(corpus.size());
  for (const auto &[term, count] : df) {
    const std::u32string scalars = text::Decode(term);
    const auto len = static_cast<int>(scalars.size());
    if (len < params.min_char || len > params.max_char) continue;
    if (params.remove_numbers && IsNumberTerm(scalars)) continue;
    const std::string lowered = text::Encode(text::ToLower(scalars));
    if (stop != nullptr && stop->contains(lowered)) continue;
    if (blacklist.contains(lowered)) continue;
    if (whitelist && !whitelist->contains(lowered)) continue;
    const double share = count / n;
    if (share < params.prune_min_df || share > params.prune_max_df) continue;
    vocab.terms.push_back(term);
    vocab.df.push_back(count);
  }
  if (vocab.terms.empty()) {
    throw Error("vocabulary is empty after filtering; relax the parameters");
  }
  vocab.Reindex();
  return vocab;
}

Vocabulary RestoreVocabulary(std::vector<std::string> terms,
                             std::vector<int> df, int num_docs,
                             AnalysisParams params) {
  if (terms.size() != df.size()) {
    throw Error("vocabulary terms and frequencies differ in length");
  }
  if (!std::is_sorted(terms.begin(), terms.end()) ||
      std::adjacent_find(terms.begin(), terms.end()) != terms.end()) {
    throw Error("vocabulary terms must be sorted and unique");
  }
  Vocabulary vocab;
  vocab.terms = std::move(terms);
  vocab.df = std::move(df);
  vocab.num_docs = num_docs;
  vocab.params = std::move(params);
  vocab.Reindex();
  return vocab;
}

int DocRow::Length() const {
  int n = 0;
  for (const auto &[term, count] : counts) n += count;
  return n;
}

const DocRow *DocTermMatrix::Find(std::string_view doc_id) const {
  for (const auto &row : rows) {
    if (row.doc_id == doc_id) return &row;
  }
  return nullptr;
}

std::size_t DocTermMatrix::RowIndex(std::string_view doc_id) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].doc_id == doc_id) return i;
  }
  throw NotFound("unknown document '" + std::string(doc_id) + "'");
}

DocTermMatrix BuildDtm(const std::vector<Document> &corpus,
                       const Vocabulary &vocab) {
  DocTermMatrix dtm;
  dtm.vocab_size = vocab.size();
  dtm.rows.reserve(corpus.size());
  for (const auto &doc : corpus) {
    DocRow row;
    row.doc_id = doc.id;
    std::map<int, int> counts;
    for (const auto &tok : TokenizeDocument(doc, vocab.params)) {
      const auto idx = vocab.Find(tok.surface);
      const int term = idx ? *idx : kFiltered;
      row.stream.push_back({tok.span, term});
      if (idx) ++counts[*idx];
    }
    row.counts.assign(counts.begin(), counts.end());
    dtm.rows.push_back(std::move(row));
  }
  return dtm;
}

std::set<std::string> BlacklistFromEntities(const std::vector<Document> &corpus,
                                            const std::set<EntityKind> &kinds) {
  std::set<std::string> terms;
  if (kinds.empty()) return terms;
  for (const auto &doc : corpus) {
    for (const auto &span : doc.entity_tags) {
      if (!kinds.contains(span.kind)) continue;
      const std::u32string surface = text::ToLower(text::Decode(span.surface));
      std::string joined;
      const auto words = text::SplitWords(surface);
      for (std::size_t i = 0; i < words.size(); ++i) {
        std::string w =
            text::Encode(surface.substr(words[i].start, words[i].length()));
        if (i > 0) joined.push_back('_');
        joined += w;
        terms.insert(std::move(w));
      }
      if (words.size() > 1) terms.insert(joined);
    }
  }
  return terms;
}

}  // namespace cmwb
