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

#include <map>

#include "cmwb/error.h"
#include "cmwb/text.h"
#include "doctest.h"
#include "json.hpp"

namespace cmwb {
namespace {

std::vector<Document> Docs(std::initializer_list<const char *> bodies) {
  std::vector<Document> docs;
  int i = 0;
  for (const char *b : bodies) {
    Document d;
    d.id = "d" + std::to_string(i++);
    d.body = b;
    docs.push_back(d);
  }
  return docs;
}

AnalysisParams Plain() {
  AnalysisParams p;
  p.remove_stopwords = false;
  return p;
}

TEST_CASE("tokenize strips punctuation and records spans") {
  const auto t = Tokenize("Paris Agreement, 2015.", AnalysisParams{});
  REQUIRE(t.size() == 3);
  CHECK(t[0].surface == "paris");
  CHECK(t[1].surface == "agreement");
  CHECK(t[2].surface == "2015");
  CHECK(t[0].span == text::Span{0, 5});
  CHECK(t[1].span == text::Span{6, 15});
  CHECK(t[2].span == text::Span{17, 21});
  CHECK(Tokenize("", AnalysisParams{}).empty());
}

TEST_CASE("case is kept when lowercase is off") {
  AnalysisParams p;
  p.lowercase = false;
  CHECK(Tokenize("Paris", p)[0].surface == "Paris");
}

TEST_CASE("bigrams follow their first word") {
  AnalysisParams p;
  p.ngram = 2;
  const auto t = Tokenize("Green climate, fund now.", p);
  std::vector<std::string> surfaces;
  for (const auto &tok : t) surfaces.push_back(tok.surface);
  // Hand enumeration: 4 unigrams plus 3 adjacent pairs.
  CHECK(surfaces == std::vector<std::string>{"green", "green_climate",
                                             "climate", "climate_fund",
                                             "fund", "fund_now", "now"});
  CHECK(t[1].span == text::Span{0, 13});
  CHECK(t[3].span == text::Span{6, 19});
}

TEST_CASE("length bounds apply to scalar values") {
  const auto v = BuildVocabulary(Docs({"a an treaty"}), Plain());
  CHECK(v.terms == std::vector<std::string>{"an", "treaty"});
  AnalysisParams p = Plain();
  p.max_char = 3;
  const auto w = BuildVocabulary(Docs({"\xC3\xA4\xC3\xB6\xC3\xBC abcd"}), p);
  CHECK(w.terms == std::vector<std::string>{"\xC3\xA4\xC3\xB6\xC3\xBC"});
}

TEST_CASE("whitelist dominates") {
  AnalysisParams p;
  p.whitelist = std::set<std::string>{"Climate"};
  const auto v = BuildVocabulary(
      Docs({"climate policy and climate finance", "more policy"}), p);
  CHECK(v.terms == std::vector<std::string>{"climate"});
}

TEST_CASE("numbers, stopwords and blacklist are removed") {
  AnalysisParams p;
  p.blacklist = {"Gambia"};
  const auto v = BuildVocabulary(
      Docs({"The Gambia pledges 1,000.5 tonnes and 20 percent by 2030"}), p);
  CHECK(v.terms == std::vector<std::string>{"percent", "pledges", "tonnes"});
  CHECK(IsNumberTerm(U"1,000.5"));
  CHECK_FALSE(IsNumberTerm(U"co2"));
}

TEST_CASE("german stopwords") {
  AnalysisParams p;
  p.stopword_language = "de";
  const auto v = BuildVocabulary(Docs({"der Klimaschutz und die Anpassung"}), p);
  CHECK(v.terms == std::vector<std::string>{"anpassung", "klimaschutz"});
  CHECK(StopwordLanguages() == std::vector<std::string>{"de", "en"});
}

TEST_CASE("an empty vocabulary is an error") {
  AnalysisParams p;
  p.whitelist = std::set<std::string>{"absent"};
  CHECK_THROWS_AS(BuildVocabulary(Docs({"some words here"}), p), Error);
}

TEST_CASE("pruning equals a brute-force document-frequency recount") {
  const auto docs = Docs({"fund water", "fund river", "fund rain", "fund loan",
                          "fund water", "fund grant", "water storm",
                          "river water", "loan bank", "water fund"});
  AnalysisParams p;
  p.prune_max_df = 0.5;
  p.prune_min_df = 0.15;
  const auto v = BuildVocabulary(docs, p);
  std::map<std::string, int> df;
  for (const auto &d : docs) {
    std::set<std::string> seen;
    for (const auto &t : Tokenize(d.body, p)) seen.insert(t.surface);
    for (const auto &t : seen) ++df[t];
  }
  std::vector<std::string> expected;
  for (const auto &[t, n] : df) {
    const double f = n / 10.0;
    if (f >= 0.15 && f <= 0.5) expected.push_back(t);
  }
  CHECK(v.terms == expected);
  for (int i = 0; i < v.size(); ++i) CHECK(v.df[i] == df[v.terms[i]]);
}

TEST_CASE("blacklist growth never grows the vocabulary") {
  const auto docs = Docs({"alpha beta gamma", "delta alpha", "epsilon"});
  AnalysisParams p = Plain();
  std::size_t last = BuildVocabulary(docs, p).terms.size();
  for (const char *b : {"alpha", "gamma", "delta", "zeta"}) {
    p.blacklist.insert(b);
    const auto size = BuildVocabulary(docs, p).terms.size();
    CHECK(size <= last);
    last = size;
  }
}

TEST_CASE("vocabulary construction is deterministic") {
  const auto docs = Docs({"bb aa cc", "cc dd", "aa ee ff"});
  const auto v1 = BuildVocabulary(docs, Plain());
  const auto v2 = BuildVocabulary(docs, Plain());
  CHECK(v1.terms == v2.terms);
  CHECK(v1.df == v2.df);
  for (int i = 0; i < v1.size(); ++i) CHECK(*v1.Find(v1.terms[i]) == i);
}

TEST_CASE("document-term counts") {
  const auto docs = Docs({"climate climate fund", "nothing here"});
  AnalysisParams p = Plain();
  p.whitelist = std::set<std::string>{"climate", "fund"};
  const auto v = BuildVocabulary(docs, p);
  const auto dtm = BuildDtm(docs, v);
  REQUIRE(dtm.rows.size() == 2);
  CHECK(dtm.rows[0].counts ==
        std::vector<std::pair<int, int>>{{*v.Find("climate"), 2},
                                         {*v.Find("fund"), 1}});
  CHECK(dtm.rows[1].counts.empty());
  REQUIRE(dtm.rows[1].stream.size() == 2);
  for (const auto &e : dtm.rows[1].stream) CHECK(e.term == kFiltered);
  CHECK_THROWS_AS(dtm.RowIndex("missing"), NotFound);
}

TEST_CASE("row sums and span fidelity on a mixed fixture") {
  const auto docs = Docs(
      {"The Fund, the FUND and the fund!", "K\xC3\xB6ln und M\xC3\xBCnchen",
       "Water; water? 42 waters.", ""});
  const auto v = BuildVocabulary(docs, AnalysisParams{});
  const auto dtm = BuildDtm(docs, v);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto &row = dtm.rows[d];
    int sum = 0;
    for (const auto &[t, c] : row.counts) {
      CHECK(c >= 1);
      sum += c;
    }
    CHECK(sum == row.Length());
    std::size_t last_end = 0;
    for (const auto &e : row.stream) {
      CHECK(e.span.start >= last_end);
      last_end = e.span.end;
      if (e.term == kFiltered) continue;
      CHECK(v.terms[e.term] ==
            text::ToLower(text::Slice(docs[d].body, e.span.start, e.span.end)));
    }
  }
}

TEST_CASE("entity blacklist") {
  Document d;
  d.body = "Gambia works with GIZ and New Zealand";
  d.entity_tags = {{0, 6, EntityKind::kLocation, "Gambia"},
                   {18, 21, EntityKind::kOrganization, "GIZ"},
                   {26, 37, EntityKind::kLocation, "New Zealand"}};
  CHECK(BlacklistFromEntities({d}, {EntityKind::kLocation}) ==
        std::set<std::string>{"gambia", "new", "zealand", "new_zealand"});
  CHECK(BlacklistFromEntities({d}, {}).empty());
}

TEST_CASE("entity consolidation joins multi-word surfaces") {
  Document d;
  d.body = "New Zealand pledges";
  d.entity_tags = {{0, 11, EntityKind::kLocation, "New Zealand"}};
  AnalysisParams p = Plain();
  p.consolidate_entities = true;
  const auto t = TokenizeDocument(d, p);
  REQUIRE(t.size() == 2);
  CHECK(t[0].surface == "new_zealand");
  CHECK(t[0].span == text::Span{0, 11});
}

TEST_CASE("params validation names every offending field") {
  AnalysisParams p;
  p.min_char = 10;
  p.max_char = 5;
  const auto errors = p.Validate("params.");
  REQUIRE_FALSE(errors.empty());
  bool min_named = false, max_named = false;
  for (const auto &e : errors) {
    min_named |= e.path == "params.min_char";
    max_named |= e.path == "params.max_char";
  }
  CHECK(min_named);
  CHECK(max_named);

  AnalysisParams q;
  q.ngram = 3;
  q.prune_min_df = 0.6;
  q.prune_max_df = 0.4;
  q.stopword_language = "xx";
  CHECK(q.Validate().size() >= 3);
}

TEST_CASE("params json round trip and strictness") {
  AnalysisParams p;
  p.ngram = 2;
  p.blacklist = {"gambia"};
  p.whitelist = std::set<std::string>{"fund"};
  p.prune_max_df = 0.9;
  CHECK(AnalysisParams::FromJson(p.ToJson()) == p);
  CHECK_THROWS_AS(AnalysisParams::FromJson({{"colour", 1}}), ValidationError);
  CHECK_THROWS_AS(AnalysisParams::FromJson({{"min_char", "two"}}),
                  ValidationError);
  try {
    AnalysisParams::FromJson({{"min_char", 9}, {"max_char", 3}}, "params.");
    FAIL("expected a validation error");
  } catch (const ValidationError &e) {
    CHECK(e.fields().size() >= 1);
  }
}

TEST_CASE("term lists skip comments and blanks") {
  CHECK(ParseTermList("# header\nfund\n\n  water  \n") ==
        std::set<std::string>{"fund", "water"});
}

}  // namespace
}  // namespace cmwb
