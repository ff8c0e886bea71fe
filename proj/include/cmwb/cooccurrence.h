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

#ifndef CMWB_COOCCURRENCE_H_
#define CMWB_COOCCURRENCE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmwb/corpus.h"
#include "cmwb/pipeline.h"

namespace cmwb {

struct TermFrequency {
  std::string term;
  std::int64_t count = 0;
  int doc_freq = 0;

  bool operator==(const TermFrequency &) const = default;
};

// Descending by total count, ties lexicographic. Throws on top_n < 1.
std::vector<TermFrequency> TermFrequencies(const DocTermMatrix &dtm,
                                           const Vocabulary &vocab,
                                           int top_n);

enum class Granularity { kYear, kMonth };

struct TimePoint {
  std::string period;  // "2015" or "2015-03"
  std::int64_t count = 0;
  int doc_count = 0;  // documents in the period that contain the term

  bool operator==(const TimePoint &) const = default;
};

struct TimeSeries {
  std::vector<TimePoint> points;
  int excluded = 0;  // dateless documents
};

// Counts `term` per period over dated documents; every period between the
// first and last dated document appears, zero or not.
TimeSeries TermTimeSeries(const std::vector<Document> &corpus,
                          const Vocabulary &vocab, std::string_view term,
                          Granularity granularity);

enum class ContextUnit { kSentence, kDocument };
enum class Measure { kDice, kPmi, kLogLikelihood };

std::string_view MeasureName(Measure m);  // "dice", "pmi", "loglik"
Measure ParseMeasure(std::string_view name);
std::string_view ContextUnitName(ContextUnit u);  // "sentence", "document"
ContextUnit ParseContextUnit(std::string_view name);

struct ContingencyCounts {
  std::int64_t n_ab = 0;
  std::int64_t n_a = 0;
  std::int64_t n_b = 0;
  std::int64_t n = 0;  // total contexts
};

double DiceScore(const ContingencyCounts &c);
// Natural log of (n_ab * N) / (n_a * n_b); exactly 0 at independence.
double PmiScore(const ContingencyCounts &c);
// Dunning's G^2 over the 2x2 table, with 0 ln 0 = 0. Never negative.
double LogLikelihoodScore(const ContingencyCounts &c);
double Score(Measure m, const ContingencyCounts &c);

struct CooccurrencePair {
  std::string term_a;  // term_a < term_b
  std::string term_b;
  ContingencyCounts counts;
  double score = 0.0;
};

struct CooccurrenceResult {
  Measure measure = Measure::kDice;
  ContextUnit unit = ContextUnit::kSentence;
  std::vector<CooccurrencePair> pairs;  // score descending, then (a, b)
};

struct CooccurrenceOptions {
  ContextUnit unit = ContextUnit::kSentence;
  Measure measure = Measure::kDice;
  int min_pair_count = 1;
  int top_n = 0;  // 0 keeps every pair
};

// Body segments between '.', '!' and '?' that contain at least one word.
std::vector<std::string> SplitSentences(std::string_view body);

// Per context, the sorted set of vocabulary terms present.
std::vector<std::vector<int>> BuildContexts(const std::vector<Document> &corpus,
                                            const Vocabulary &vocab,
                                            ContextUnit unit);

CooccurrenceResult Cooccurrences(const std::vector<Document> &corpus,
                                 const Vocabulary &vocab,
                                 const CooccurrenceOptions &options);

// term_a,term_b,n_a,n_b,n_ab,N,measure,score (6 decimals), with header.
std::string CooccurrenceCsv(const CooccurrenceResult &result);

}  // namespace cmwb

#endif  // CMWB_COOCCURRENCE_H_
