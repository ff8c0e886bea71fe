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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Each check compares the library against an independent
// computation or a property that must hold regardless of implementation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cmwb/classify.h"
#include "cmwb/cli.h"
#include "cmwb/cooccurrence.h"
#include "cmwb/csv.h"
#include "cmwb/fileutil.h"
#include "cmwb/interchange.h"
#include "cmwb/pipeline.h"
#include "cmwb/rng.h"
#include "cmwb/service.h"
#include "cmwb/synth.h"
#include "cmwb/topics.h"
#include "json.hpp"
#include "test_util.h"

namespace cmwb {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Runner {
 public:
  void Check(const std::string &name, double limit_seconds,
             const std::function<Outcome()> &body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (limit_seconds > 0 && secs >= limit_seconds) {
      o.pass = false;
      o.detail += "; exceeded " + csv::FormatFixed(limit_seconds, 0) + " s";
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail
              << " [" << csv::FormatFixed(secs, 2) << " s]" << std::endl;
    failures_ += o.pass ? 0 : 1;
  }

  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::vector<Document> LinesAsDocuments(const std::string &data) {
  std::vector<Document> docs;
  std::istringstream in(data);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Document d;
    d.id = "doc" + std::to_string(docs.size());
    d.body = line;
    docs.push_back(d);
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Co-occurrence: brute force over sentence word sets, G^2 as
// 2 * sum O ln(O / E) over the four cells.

struct Brute {
  std::int64_t n_a, n_b, n_ab, n;
  double dice, pmi, g2;
};

std::vector<std::set<std::string>> SentenceWordSets(
    const std::vector<Document> &docs) {
  std::vector<std::set<std::string>> out;
  for (const auto &d : docs) {
    std::set<std::string> words;
    std::string word;
    auto end_word = [&] {
      if (word.size() >= 2) words.insert(word);
      word.clear();
    };
    for (char c : d.body + ".") {
      const auto u = static_cast<unsigned char>(c);
      if (std::isalpha(u)) {
        word += static_cast<char>(std::tolower(u));
        continue;
      }
      end_word();
      if (c == '.' || c == '!' || c == '?') {
        if (!words.empty()) out.push_back(words);
        words.clear();
      }
    }
  }
  return out;
}

std::map<std::pair<std::string, std::string>, Brute> BruteForce(
    const std::vector<std::set<std::string>> &sentences) {
  std::set<std::string> vocab;
  for (const auto &s : sentences) vocab.insert(s.begin(), s.end());
  const std::vector<std::string> terms(vocab.begin(), vocab.end());
  const double n = static_cast<double>(sentences.size());
  std::map<std::pair<std::string, std::string>, Brute> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      std::int64_t a = 0, b = 0, ab = 0;
      for (const auto &s : sentences) {
        const bool ha = s.count(terms[i]) > 0;
        const bool hb = s.count(terms[j]) > 0;
        a += ha;
        b += hb;
        ab += ha && hb;
      }
      if (ab == 0) continue;
      const double o[4] = {double(ab), double(a - ab), double(b - ab),
                           n - a - b + ab};
      const double row[2] = {double(a), n - a};
      const double col[2] = {double(b), n - b};
      double g2 = 0.0;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          const double obs = o[r * 2 + c];
          const double expected = row[r] * col[c] / n;
          if (obs > 0) g2 += obs * std::log(obs / expected);
        }
      }
      out[{terms[i], terms[j]}] = {
          a,       b, ab, static_cast<std::int64_t>(n),
          2.0 * ab / (a + b), std::log(ab * n / (double(a) * b)),
          std::max(0.0, 2.0 * g2)};
    }
  }
  return out;
}

Outcome CooccurrenceOracle() {
  const auto docs = LinesAsDocuments(
      ReadFile(testing::TestData("fixtures/fifty_sentences.txt")));
  const auto sentences = SentenceWordSets(docs);
  if (sentences.size() != 50) {
    return {false, "fixture has " + std::to_string(sentences.size()) +
                       " sentences"};
  }
  const auto expected = BruteForce(sentences);
  const Vocabulary vocab = BuildVocabulary(docs, AnalysisParams{});
  double worst = 0.0;
  for (Measure m : {Measure::kDice, Measure::kPmi, Measure::kLogLikelihood}) {
    CooccurrenceOptions opt;
    opt.measure = m;
    const auto result = Cooccurrences(docs, vocab, opt);
    if (result.pairs.size() != expected.size()) {
      return {false, "pair count " + std::to_string(result.pairs.size()) +
                         " vs " + std::to_string(expected.size())};
    }
    for (const auto &p : result.pairs) {
      auto it = expected.find({p.term_a, p.term_b});
      if (it == expected.end()) return {false, "unexpected pair " + p.term_a};
      const Brute &e = it->second;
      if (p.counts.n_a != e.n_a || p.counts.n_b != e.n_b ||
          p.counts.n_ab != e.n_ab || p.counts.n != e.n) {
        return {false, "counts differ for " + p.term_a + "/" + p.term_b};
      }
      const double want =
          m == Measure::kDice ? e.dice : m == Measure::kPmi ? e.pmi : e.g2;
      worst = std::max(worst, std::abs(p.score - want));
    }
  }
  // Exact independence: every pair across the two groups has
  // n_ab * N == n_a * n_b.
  const auto indep = LinesAsDocuments(
      "alpha beta. alpha gamma. delta beta. delta gamma.\n");
  const Vocabulary iv = BuildVocabulary(indep, AnalysisParams{});
  bool exact = true;
  for (Measure m : {Measure::kPmi, Measure::kLogLikelihood}) {
    CooccurrenceOptions opt;
    opt.measure = m;
    for (const auto &p : Cooccurrences(indep, iv, opt).pairs) {
      exact = exact && p.score == 0.0;
    }
  }
  const bool pass = worst <= 1e-9 && exact;
  return {pass, std::to_string(expected.size()) +
                    " pairs x 3 measures, max |diff| " +
                    csv::FormatSignificant(worst, 3) +
                    (exact ? ", independence gives PMI = G2 = 0"
                           : ", independence scores not exactly 0")};
}

// ---------------------------------------------------------------------------
// LDA recovery on two disjoint vocabularies.

struct Recovery {
  synth::TopicCorpus corpus;
  DocTermMatrix dtm;
  TopicModel model;
};

Recovery FitTwoTopics() {
  Recovery r{synth::TwoTopicCorpus(2026, 40, 60, 0.8), {}, {}};
  const Vocabulary vocab =
      BuildVocabulary(r.corpus.documents, AnalysisParams{});
  r.dtm = BuildDtm(r.corpus.documents, vocab);
  LdaConfig config = LdaConfig::Defaults(2);
  config.iterations = 1000;
  config.burn_in = 500;
  config.seed = 17;
  r.model = FitLda(r.dtm, vocab, config);
  return r;
}

Outcome LdaRecovery(const Recovery &r) {
  const TopicModel &m = r.model;
  // Purity under the better of the two topic matchings.
  std::int64_t same = 0, total = 0;
  for (int d = 0; d < m.num_docs(); ++d) {
    for (std::size_t i = 0; i < m.words[d].size(); ++i) {
      const int truth = r.corpus.word_topic.at(m.terms[m.words[d][i]]);
      same += m.z[d][i] == truth;
      ++total;
    }
  }
  const double purity =
      std::max(same, total - same) / static_cast<double>(total);
  double worst_sum = 0.0;
  for (int d = 0; d < m.num_docs(); ++d) {
    double s = 0.0;
    for (int k = 0; k < m.num_topics(); ++k) s += m.theta(d, k);
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  for (int k = 0; k < m.num_topics(); ++k) {
    double s = 0.0;
    for (int w = 0; w < m.vocab_size(); ++w) s += m.phi(k, w);
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  const bool counts = CountsConsistent(m);
  const bool pass = purity >= 0.95 && worst_sum <= 1e-9 && counts &&
                    m.vocab_size() == 20 && m.num_docs() == 40;
  return {pass, "purity " + csv::FormatFixed(purity, 4) + " over " +
                    std::to_string(total) + " tokens, max |row sum - 1| " +
                    csv::FormatSignificant(worst_sum, 3) + ", counts " +
                    (counts ? "recomputable from z" : "inconsistent")};
}

double MeanCoherence(const TopicModel &m, const DocTermMatrix &dtm) {
  const auto c = CoherenceUmass(m, dtm, 10);
  double s = 0.0;
  for (double x : c.scores) s += x;
  return s / c.scores.size();
}

Outcome CoherenceOrdering(const Recovery &r) {
  const double fitted = MeanCoherence(r.model, r.dtm);
  Rng rng(99);
  double best_permuted = -INFINITY;
  for (int p = 0; p < 10; ++p) {
    TopicModel shuffled = r.model;
    for (int k = 0; k < shuffled.num_topics(); ++k) {
      std::vector<double> row(shuffled.phi.row(k).begin(),
                              shuffled.phi.row(k).end());
      rng.Shuffle(&row);
      std::copy(row.begin(), row.end(), shuffled.phi.row(k).begin());
    }
    best_permuted = std::max(best_permuted, MeanCoherence(shuffled, r.dtm));
  }
  return {fitted > best_permuted,
          "fitted " + csv::FormatFixed(fitted, 4) +
              ", best of 10 permutations " +
              csv::FormatFixed(best_permuted, 4)};
}

// ---------------------------------------------------------------------------
// Active learning: entropy sampling against random sampling.

Outcome ActiveLearning() {
  constexpr int kBudget = 120;
  int wins = 0;
  double sum_entropy = 0.0, sum_random = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto corpus = synth::SeparableCorpus(seed, 200, 2);
    const Vocabulary vocab = BuildVocabulary(corpus.documents, AnalysisParams{});
    const DocTermMatrix dtm = BuildDtm(corpus.documents, vocab);
    auto labels_needed = [&](Strategy s) {
      SimulationOptions opt;
      opt.strategy = s;
      opt.budget = kBudget;
      opt.seed = seed;
      const auto curve =
          SimulateActiveLearning(dtm, corpus.gold, corpus.codebook, opt);
      // Never reaching the target counts as one label past the curve.
      return LabelsToAccuracy(curve, 0.9).value_or(curve.back().labels + 1);
    };
    const int e = labels_needed(Strategy::kEntropy);
    const int r = labels_needed(Strategy::kRandom);
    wins += e <= r;
    sum_entropy += e;
    sum_random += r;
  }
  const double me = sum_entropy / 20, mr = sum_random / 20;
  return {wins >= 16 && me <= mr,
          "entropy <= random in " + std::to_string(wins) +
              "/20 seeds, mean labels to 90% " + csv::FormatFixed(me, 2) +
              " vs " + csv::FormatFixed(mr, 2)};
}

// ---------------------------------------------------------------------------
// Metrics on hand-built confusion matrices.

Matrix<int> Confusion(std::vector<std::vector<int>> rows) {
  Matrix<int> m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Outcome MetricsExactness() {
  std::vector<std::string> failures;
  auto expect = [&](const char *what, double got, double want) {
    if (got != want) {
      failures.push_back(std::string(what) + " " +
                         csv::FormatSignificant(got, 17) + " != " +
                         csv::FormatSignificant(want, 17));
    }
  };
  // Gold rows a, b, c; c is never predicted, so its precision has a zero
  // denominator.
  const auto r = ReportFromConfusion({"a", "b", "c"},
                                     Confusion({{3, 1, 0}, {2, 2, 0}, {0, 1, 0}}));
  const double pa = 3.0 / 5, ra = 3.0 / 4, fa = 2.0 / 3;
  const double pb = 0.5, rb = 0.5, fb = 0.5;
  expect("P(a)", r.per_class[0].precision, pa);
  expect("R(a)", r.per_class[0].recall, ra);
  expect("F1(a)", r.per_class[0].f1, fa);
  expect("P(b)", r.per_class[1].precision, pb);
  expect("R(b)", r.per_class[1].recall, rb);
  expect("F1(b)", r.per_class[1].f1, fb);
  expect("P(c)", r.per_class[2].precision, 0.0);
  expect("R(c)", r.per_class[2].recall, 0.0);
  expect("F1(c)", r.per_class[2].f1, 0.0);
  expect("macro P", r.macro_precision, (pa + pb + 0.0) / 3);
  expect("macro R", r.macro_recall, (ra + rb + 0.0) / 3);
  expect("macro F1", r.macro_f1, (fa + fb + 0.0) / 3);
  expect("micro P", r.micro_precision, 5.0 / 9);
  expect("micro R", r.micro_recall, 5.0 / 9);
  expect("micro F1", r.micro_f1, 5.0 / 9);
  if (r.per_class[2].support != 1) failures.push_back("support(c)");

  // A class absent from gold and predictions alike: every ratio is 0/0.
  const auto empty =
      ReportFromConfusion({"x", "y"}, Confusion({{4, 0}, {0, 0}}));
  expect("P(x)", empty.per_class[0].precision, 1.0);
  expect("R(x)", empty.per_class[0].recall, 1.0);
  expect("F1(x)", empty.per_class[0].f1, 1.0);
  expect("P(y)", empty.per_class[1].precision, 0.0);
  expect("R(y)", empty.per_class[1].recall, 0.0);
  expect("F1(y)", empty.per_class[1].f1, 0.0);
  expect("macro F1 (x, y)", empty.macro_f1, 0.5);
  expect("micro F1 (x, y)", empty.micro_f1, 1.0);

  // Nothing correct at all.
  const auto wrong = ReportFromConfusion({"p", "q"}, Confusion({{0, 2}, {3, 0}}));
  expect("micro P (all wrong)", wrong.micro_precision, 0.0);
  expect("F1(p) (all wrong)", wrong.per_class[0].f1, 0.0);

  std::string detail = failures.empty()
                           ? "3 fixtures, 25 values equal the hand results"
                           : failures.front();
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// Interchange round trips.

Corpus TrickyCorpus() {
  Corpus c;
  auto doc = [&](std::string id, std::string title, std::optional<Date> date,
                 std::string body, std::map<std::string, std::string> meta) {
    Document d;
    d.id = std::move(id);
    d.title = std::move(title);
    d.date = date;
    d.body = std::move(body);
    d.metadata = std::move(meta);
    c.documents.push_back(d);
  };
  doc("a1", "Plain", ParseDate("2020-01-31", "%Y-%m-%d"),
      "Water, rivers and \"quotes\".", {{"country", "Peru"}, {"annex", "NA"}});
  doc("a2", "Multi\nline", std::nullopt,
      "Line one\nline two\r\nline three", {{"country", "Côte d'Ivoire"}});
  doc("a3", "Unicode ünïcødé 🌍", ParseDate("1999-12-01", "%Y-%m-%d"),
      "Émissions € réduction; \"quoted, text\"", {{"annex", "Annex-1"}});
  doc("a4", "", std::nullopt, "   leading and trailing spaces   ", {});
  c.RefreshSchema();
  return c;
}

Outcome InterchangeRoundTrips() {
  TempDir dir;
  std::vector<std::string> problems;
  // Corpus CSV.
  const Corpus corpus = TrickyCorpus();
  ExportCorpusCsv(corpus, dir / "c1.csv");
  const Corpus back = ImportCorpusCsv(dir / "c1.csv");
  if (back.documents != corpus.documents) problems.push_back("corpus fields");
  ExportCorpusCsv(back, dir / "c2.csv");
  ExportCorpusCsv(corpus, dir / "c3.csv");
  const std::string c1 = ReadFile(dir / "c1.csv");
  if (c1 != ReadFile(dir / "c2.csv") || c1 != ReadFile(dir / "c3.csv")) {
    problems.push_back("corpus CSV bytes");
  }
  // QDPX from labels.
  Codebook codebook;
  codebook.codes = {{"fin", "Finance", "money flows"},
                    {"ada", "Adaptation", ""}};
  const LabelMap labels = {{"a1", "fin"}, {"a3", "ada"}};
  const QdpxProject project =
      ProjectFromLabels("Round trip", corpus, codebook, labels, 7);
  ExportQdpx(project, dir / "p1.qdpx");
  const QdpxImport imported = ImportQdpx(dir / "p1.qdpx");
  if (!(imported.project == project)) problems.push_back("qdpx fields");
  ExportQdpx(imported.project, dir / "p2.qdpx");
  ExportQdpx(project, dir / "p3.qdpx");
  const std::string q1 = ReadFile(dir / "p1.qdpx");
  if (q1 != ReadFile(dir / "p2.qdpx") || q1 != ReadFile(dir / "p3.qdpx")) {
    problems.push_back("qdpx bytes");
  }
  // A project written by another tool.
  const QdpxImport fixture =
      ImportQdpx(testing::TestData("fixtures/minimal.qdpx"));
  const QdpxImport again = ParseQdpxArchive(QdpxArchive(fixture.project));
  if (!(again.project == fixture.project)) problems.push_back("fixture qdpx");
  return {problems.empty(),
          problems.empty()
              ? "corpus CSV (4 docs) and QDPX (2 projects) lossless; "
                "repeated exports byte-identical"
              : "mismatch: " + problems.front()};
}

// ---------------------------------------------------------------------------
// Command line and service on the same input.

Outcome FrontEndDeterminism() {
  TempDir dir;
  Corpus corpus;
  corpus.documents = synth::TwoTopicCorpus(8, 30, 50).documents;
  corpus.RefreshSchema();
  WriteFileAtomic(dir / "docs.csv", CorpusCsv(corpus));
  std::ostringstream out, err;
  auto cli = [&](std::vector<std::string> args) {
    out.str("");
    if (cli::Execute(args, out, err) != cli::kExitOk) {
      throw Error("cmwb " + args.front() + " failed: " + err.str());
    }
    return out.str();
  };
  const std::string c = (dir / "corpus").string();
  cli({"import", "--input", (dir / "docs.csv").string(), "--format",
       "corpus-csv", "--out", c});
  cli({"lda", "--corpus", c, "--k", "3", "--iterations", "300", "--burn-in",
       "100", "--seed", "12", "--out", (dir / "model").string()});
  const std::string pairs =
      cli({"cooc", "--corpus", c, "--measure", "loglik", "--min-count", "2"});

  service::Service svc({dir / "data", 2, service::SystemClock});
  svc.Handle("POST", "/projects", {}, R"({"name":"determinism"})");
  svc.Handle("POST", "/projects/p1/import", {},
             json{{"format", "corpus_csv"},
                  {"data", ReadFile(dir / "docs.csv")}}
                 .dump());
  svc.WaitIdle();
  svc.Handle("POST", "/projects/p1/jobs", {},
             R"({"kind":"lda","params":{"k":3,"iterations":300,)"
             R"("burn_in":100,"seed":12}})");
  svc.Handle("POST", "/projects/p1/jobs", {},
             R"({"kind":"cooc","params":{"measure":"loglik","min_count":2}})");
  svc.WaitIdle();
  auto file = [&](const std::string &job, const std::string &name) {
    const auto r = svc.Handle(
        "GET", "/projects/p1/results/" + job + "/files/" + name, {}, "");
    if (r.status != 200) throw Error(job + "/" + name + ": " + r.body);
    return r.body;
  };
  std::vector<std::string> differ;
  for (const char *f : {"theta.csv", "phi.csv"}) {
    if (file("j2", f) != ReadFile(dir / "model" / f)) differ.push_back(f);
  }
  if (file("j3", "pairs.csv") != pairs) differ.push_back("pairs.csv");
  return {differ.empty(),
          differ.empty() ? "theta.csv, phi.csv and pairs.csv byte-identical"
                         : differ.front() + " differs"};
}

// ---------------------------------------------------------------------------
// The bundled study walkthrough.

int PlantedTopic(const TopicModel &m, const std::vector<std::string> &words) {
  // The topic holding most of the planted words' probability mass.
  int best = 0;
  double best_mass = -1.0;
  for (int k = 0; k < m.num_topics(); ++k) {
    double mass = 0.0;
    for (const auto &w : words) {
      auto it = std::find(m.terms.begin(), m.terms.end(), w);
      if (it != m.terms.end()) mass += m.phi(k, it - m.terms.begin());
    }
    if (mass > best_mass) best_mass = mass, best = k;
  }
  return best;
}

Outcome StudyWalkthrough() {
  TempDir dir;
  const std::string log = (dir / "walkthrough.log").string();
  const std::string command = std::string("bash '") + CMWB_SCRIPT + "' '" +
                              CMWB_BINARY + "' '" + (dir / "work").string() +
                              "' > '" + log + "' 2>&1";
  const int status = std::system(command.c_str());
  if (status != 0) {
    return {false, "script exited with status " + std::to_string(status)};
  }
  const TopicModel model = LoadModel(dir / "work" / "model");
  const Corpus corpus = LoadCorpus(dir / "work" / "corpus");
  const auto &words = synth::NdcTopicWords();
  const auto study = synth::NdcStyleCorpus(1);
  const int finance = PlantedTopic(model, words[study.finance_topic]);
  const int adaptation = PlantedTopic(model, words[study.adaptation_topic]);
  const auto groups = TopicByMetadata(model, corpus, "annex");
  const auto &annex = groups.at("Annex-1").mean_theta;
  const auto &non = groups.at("Non-Annex").mean_theta;
  const double sep_fin = annex[finance] - non[finance];
  const double sep_ada = non[adaptation] - annex[adaptation];
  const bool labeled = model.labels.active.count(finance) == 1 &&
                       model.labels.active.at(finance).label == "Finance";
  return {sep_fin >= 0.9 && sep_ada >= 0.9 && labeled,
          "finance topic " + std::to_string(finance) +
              (labeled ? " labeled" : " NOT labeled") +
              ", Annex-1 minus Non-Annex " + csv::FormatFixed(sep_fin, 4) +
              "; adaptation topic " + std::to_string(adaptation) +
              ", Non-Annex minus Annex-1 " + csv::FormatFixed(sep_ada, 4)};
}

}  // namespace
}  // namespace cmwb

int main() {
  using namespace cmwb;
  Runner run;
  run.Check("cooccurrence oracle", 5, CooccurrenceOracle);
  Recovery recovery;
  run.Check("lda recovery", 30, [&] {
    recovery = FitTwoTopics();
    return LdaRecovery(recovery);
  });
  run.Check("coherence ordering", 0, [&] {
    if (recovery.model.num_topics() == 0) recovery = FitTwoTopics();
    return CoherenceOrdering(recovery);
  });
  run.Check("active learning efficiency", 60, ActiveLearning);
  run.Check("metrics exactness", 0, MetricsExactness);
  run.Check("interchange round trips", 0, InterchangeRoundTrips);
  run.Check("cli and api determinism", 0, FrontEndDeterminism);
  run.Check("study walkthrough", 0, StudyWalkthrough);
  std::cout << (run.failures() == 0 ? "all criteria passed"
                                    : std::to_string(run.failures()) +
                                          " criteria failed")
            << std::endl;
  return run.failures() == 0 ? 0 : 1;
}
