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

#include "cmwb/cooccurrence.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cmwb/csv.h"
#include "cmwb/error.h"

namespace cmwb {

std::vector<TermFrequency> TermFrequencies(const DocTermMatrix &dtm,
                                           const Vocabulary &vocab,
                                           int top_n) {
  if (top_n < 1) throw Error("top_n must be at least 1");
  std::vector<TermFrequency> freq(vocab.size());
  for (int i = 0; i < vocab.size(); ++i) freq[i].term = vocab.terms[i];
  for (const auto &row : dtm.rows) {
    for (const auto &[term, count] : row.counts) {
      freq[term].count += count;
      ++freq[term].doc_freq;
    }
  }
  std::erase_if(freq, [](const TermFrequency &f) { return f.count == 0; });
  std::sort(freq.begin(), freq.end(),
            [](const TermFrequency &a, const TermFrequency &b) {
              if (a.count != b.count) return a.count > b.count;
              return a.term < b.term;
            });
  if (freq.size() > static_cast<std::size_t>(top_n)) freq.resize(top_n);
  return freq;
}

namespace {

int PeriodKey(const Date &d, Granularity g) {
  return g == Granularity::kYear ? d.year : d.year * 12 + (d.month - 1);
}

std::string PeriodLabel(int key, Granularity g) {
  if (g == Granularity::kYear) return std::to_string(key);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", key / 12, key % 12 + 1);
  return buf;
}

}  // namespace

TimeSeries TermTimeSeries(const std::vector<Document> &corpus,
                          const Vocabulary &vocab, std::string_view term,
                          Granularity granularity) {
  const auto idx = vocab.Find(term);
  if (!idx) throw Error("unknown term '" + std::string(term) + "'");
  TimeSeries series;
  std::map<int, TimePoint> by_period;
  for (const auto &doc : corpus) {
    if (!doc.date) {
      ++series.excluded;
      continue;
    }
    auto &point = by_period[PeriodKey(*doc.date, granularity)];
    std::int64_t hits = 0;
    for (const auto &tok : TokenizeDocument(doc, vocab.params)) {
      if (tok.surface == term) ++hits;
    }
    point.count += hits;
    if (hits > 0) ++point.doc_count;
  }
  if (by_period.empty()) return series;
  const int first = by_period.begin()->first;
  const int last = by_period.rbegin()->first;
  for (int key = first; key <= last; ++key) {
    TimePoint p;
    if (auto it = by_period.find(key); it != by_period.end()) p = it->second;
    p.period = PeriodLabel(key, granularity);
    series.points.push_back(std::move(p));
  }
  return series;
}

std::string_view MeasureName(Measure m) {
  switch (m) {
    case Measure::kDice: return "dice";
    case Measure::kPmi: return "pmi";
    case Measure::kLogLikelihood: return "loglik";
  }
  return "dice";
}

Measure ParseMeasure(std::string_view name) {
  std::string lower(name);
  for (char &c : lower) c = static_cast<char>(std::tolower(c));
  if (lower == "dice") return Measure::kDice;
  if (lower == "pmi") return Measure::kPmi;
  if (lower == "loglik" || lower == "log-likelihood" || lower == "g2") {
    return Measure::kLogLikelihood;
  }
  throw Error("unknown measure '" + std::string(name) +
              "' (expected dice, pmi or loglik)");
}

std::string_view ContextUnitName(ContextUnit u) {
  return u == ContextUnit::kSentence ? "sentence" : "document";
}

ContextUnit ParseContextUnit(std::string_view name) {
  std::string lower(name);
  for (char &c : lower) c = static_cast<char>(std::tolower(c));
  if (lower == "sentence") return ContextUnit::kSentence;
  if (lower == "document") return ContextUnit::kDocument;
  throw Error("unknown context unit '" + std::string(name) +
              "' (expected sentence or document)");
}

double DiceScore(const ContingencyCounts &c) {
  return 2.0 * static_cast<double>(c.n_ab) /
         static_cast<double>(c.n_a + c.n_b);
}

double PmiScore(const ContingencyCounts &c) {
  // Integer products keep exact independence at exactly log(1) = 0.
  const double num = static_cast<double>(c.n_ab * c.n);
  const double den = static_cast<double>(c.n_a * c.n_b);
  return std::log(num / den);
}

double LogLikelihoodScore(const ContingencyCounts &c) {
  const std::int64_t observed[4] = {c.n_ab, c.n_a - c.n_ab, c.n_b - c.n_ab,
                                    c.n - c.n_a - c.n_b + c.n_ab};
  const std::int64_t rows[2] = {c.n_a, c.n - c.n_a};
  const std::int64_t cols[2] = {c.n_b, c.n - c.n_b};
  double g2 = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int k = 0; k < 2; ++k) {
      const std::int64_t o = observed[r * 2 + k];
      if (o == 0) continue;
      // O / E = O * N / (row * col)
      const double ratio = static_cast<double>(o * c.n) /
                           static_cast<double>(rows[r] * cols[k]);
      g2 += static_cast<double>(o) * std::log(ratio);
    }
  }
  return std::max(0.0, 2.0 * g2);
}

double Score(Measure m, const ContingencyCounts &c) {
  switch (m) {
    case Measure::kDice: return DiceScore(c);
    case Measure::kPmi: return PmiScore(c);
    case Measure::kLogLikelihood: return LogLikelihoodScore(c);
  }
  return 0.0;
}

std::vector<std::string> SplitSentences(std::string_view body) {
  std::vector<std::string> sentences;
  std::string current;
  auto flush = [&] {
    if (!text::SplitWords(text::Decode(current)).empty()) {
      sentences.push_back(current);
    }
    current.clear();
  };
  for (char c : body) {
    if (c == '.' || c == '!' || c == '?') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return sentences;
}

std::vector<std::vector<int>> BuildContexts(const std::vector<Document> &corpus,
                                            const Vocabulary &vocab,
                                            ContextUnit unit) {
  std::vector<std::vector<int>> contexts;
  auto collect = [&](const std::vector<Token> &tokens) {
    std::vector<int> present;
    for (const auto &tok : tokens) {
      if (auto idx = vocab.Find(tok.surface)) present.push_back(*idx);
    }
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    contexts.push_back(std::move(present));
  };
  for (const auto &doc : corpus) {
    if (unit == ContextUnit::kDocument) {
      collect(TokenizeDocument(doc, vocab.params));
    } else {
      for (const auto &sentence : SplitSentences(doc.body)) {
        collect(Tokenize(sentence, vocab.params));
      }
    }
  }
  return contexts;
}

CooccurrenceResult Cooccurrences(const std::vector<Document> &corpus,
                                 const Vocabulary &vocab,
                                 const CooccurrenceOptions &options) {
  if (options.min_pair_count < 1) throw Error("min_pair_count must be >= 1");
  if (vocab.size() < 2) throw Error("need at least 2 vocabulary terms");
  if (options.top_n < 0) throw Error("top_n must not be negative");

  const auto contexts = BuildContexts(corpus, vocab, options.unit);
  const auto v = static_cast<std::uint64_t>(vocab.size());
  std::vector<std::int64_t> term_contexts(v, 0);
  std::unordered_map<std::uint64_t, std::int64_t> pair_contexts;
  for (const auto &ctx : contexts) {
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      ++term_contexts[ctx[i]];
      for (std::size_t j = i + 1; j < ctx.size(); ++j) {
        ++pair_contexts[static_cast<std::uint64_t>(ctx[i]) * v + ctx[j]];
      }
    }
  }

  CooccurrenceResult result;
  result.measure = options.measure;
  result.unit = options.unit;
  const auto n = static_cast<std::int64_t>(contexts.size());
  for (const auto &[key, n_ab] : pair_contexts) {
    if (n_ab < options.min_pair_count) continue;
    const auto a = static_cast<int>(key / v);
    const auto b = static_cast<int>(key % v);
    CooccurrencePair pair;
    pair.term_a = vocab.terms[a];
    pair.term_b = vocab.terms[b];
    pair.counts = {n_ab, term_contexts[a], term_contexts[b], n};
    pair.score = Score(options.measure, pair.counts);
    result.pairs.push_back(std::move(pair));
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const CooccurrencePair &x, const CooccurrencePair &y) {
              if (x.score != y.score) return x.score > y.score;
              if (x.term_a != y.term_a) return x.term_a < y.term_a;
              return x.term_b < y.term_b;
            });
  if (options.top_n > 0 &&
      result.pairs.size() > static_cast<std::size_t>(options.top_n)) {
    result.pairs.resize(options.top_n);
  }
  return result;
}

std::string CooccurrenceCsv(const CooccurrenceResult &result) {
  std::string out = "term_a,term_b,n_a,n_b,n_ab,N,measure,score\n";
  const std::string measure(MeasureName(result.measure));
  for (const auto &p : result.pairs) {
    out += csv::FormatRow({p.term_a, p.term_b, std::to_string(p.counts.n_a),
                           std::to_string(p.counts.n_b),
                           std::to_string(p.counts.n_ab),
                           std::to_string(p.counts.n), measure,
                           csv::FormatFixed(p.score, 6)});
  }
  return out;
}

}  // namespace cmwb
