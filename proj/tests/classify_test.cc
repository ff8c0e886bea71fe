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

#include "cmwb/classify.h"

#include <cmath>
#include <map>
#include <numeric>

#include "cmwb/error.h"
#include "cmwb/synth.h"
#include "doctest.h"

namespace cmwb {
namespace {

struct Setup {
  std::vector<Document> docs;
  Vocabulary vocab;
  DocTermMatrix dtm;
};

Setup Make(std::vector<std::pair<std::string, std::string>> id_body) {
  Setup s;
  for (auto &[id, body] : id_body) {
    Document d;
    d.id = id;
    d.body = body;
    s.docs.push_back(d);
  }
  s.vocab = BuildVocabulary(s.docs, AnalysisParams{});
  s.dtm = BuildDtm(s.docs, s.vocab);
  return s;
}

Codebook TwoCodes() {
  Codebook cb;
  cb.codes = {{"finance", "Finance", ""}, {"water", "Water", ""}};
  return cb;
}

TEST_CASE("disjoint evidence decides the class") {
  auto s = Make({{"a", "fund money"}, {"b", "water flood"}, {"q", "fund"}});
  const auto model =
      TrainNaiveBayes(s.dtm, {{"a", "finance"}, {"b", "water"}}, TwoCodes());
  const auto p = Predict(model, *s.dtm.Find("q"));
  CHECK(p.code == "finance");
  CHECK(p.code_index == 0);
  CHECK(std::accumulate(p.posterior.begin(), p.posterior.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every code needs a labeled document") {
  auto s = Make({{"a", "fund money"}, {"b", "water flood"}});
  try {
    TrainNaiveBayes(s.dtm, {{"a", "finance"}, {"b", "finance"}}, TwoCodes());
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("water") != std::string::npos);
  }
}

TEST_CASE("naive Bayes equals the closed-form oracle") {
  auto s = Make({{"d1", "fund fund money bank"},
                 {"d2", "money loan fund"},
                 {"d3", "bank loan"},
                 {"d4", "water flood river"},
                 {"d5", "river river rain"},
                 {"d6", "flood rain water money"},
                 {"d7", "fund river"},
                 {"d8", "bank rain rain loan"}});
  const LabelMap labels = {{"d1", "finance"}, {"d2", "finance"},
                           {"d3", "finance"}, {"d4", "water"},
                           {"d5", "water"},   {"d6", "water"}};
  const auto model = TrainNaiveBayes(s.dtm, labels, TwoCodes());
  const int v = s.vocab.size();
  // Oracle: priors by label share, add-one smoothed multinomial likelihoods.
  std::vector<std::vector<double>> count(2, std::vector<double>(v, 0.0));
  std::vector<double> docs(2, 0.0);
  for (const auto &[doc, code] : labels) {
    const int c = code == "finance" ? 0 : 1;
    docs[c] += 1;
    for (const auto &[t, n] : s.dtm.Find(doc)->counts) count[c][t] += n;
  }
  double prior_sum = 0;
  for (int c = 0; c < 2; ++c) {
    prior_sum += std::exp(model.log_prior()[c]);
    CHECK(model.log_prior()[c] == doctest::Approx(std::log(docs[c] / 6.0)));
    const double total = std::accumulate(count[c].begin(), count[c].end(), 0.0);
    double lik_sum = 0;
    for (int w = 0; w < v; ++w) {
      const double expected = std::log((count[c][w] + 1.0) / (total + v));
      CHECK(model.log_likelihood()(c, w) == doctest::Approx(expected));
      lik_sum += std::exp(model.log_likelihood()(c, w));
    }
    CHECK(std::abs(lik_sum - 1.0) <= 1e-9);
  }
  CHECK(std::abs(prior_sum - 1.0) <= 1e-9);

  for (const char *q : {"d7", "d8"}) {
    std::vector<double> log_post(2);
    for (int c = 0; c < 2; ++c) {
      const double total =
          std::accumulate(count[c].begin(), count[c].end(), 0.0);
      log_post[c] = std::log(docs[c] / 6.0);
      for (const auto &[t, n] : s.dtm.Find(q)->counts) {
        log_post[c] += n * std::log((count[c][t] + 1.0) / (total + v));
      }
    }
    const double z = std::exp(log_post[0]) + std::exp(log_post[1]);
    const auto p = Predict(model, *s.dtm.Find(q));
    CHECK(p.posterior[0] == doctest::Approx(std::exp(log_post[0]) / z));
    CHECK(p.posterior[1] == doctest::Approx(std::exp(log_post[1]) / z));
  }
}

TEST_CASE("no evidence falls back to the priors") {
  auto s = Make({{"a", "fund"}, {"b", "fund"}, {"c", "water"}});
  const auto model = TrainNaiveBayes(
      s.dtm, {{"a", "finance"}, {"b", "finance"}, {"c", "water"}}, TwoCodes());
  DocRow empty;
  const auto p = Predict(model, empty);
  CHECK(p.posterior[0] == doctest::Approx(2.0 / 3.0));
  CHECK(p.posterior[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("normalization is shift invariant and stable") {
  const auto a = NormalizeLogScores({-1000.0, -1001.0});
  const auto b = NormalizeLogScores({0.0, -1.0});
  CHECK(a[0] == doctest::Approx(b[0]));
  CHECK(a[0] + a[1] == doctest::Approx(1.0));
  // Ties go to the first code.
  CHECK(NormalizeLogScores({-2.0, -2.0})[0] == 0.5);
}

TEST_CASE("all strategies pick the uncertain document") {
  const std::map<std::string, std::vector<double>> post = {
      {"d1", {0.9, 0.1}}, {"d2", {0.55, 0.45}}};
  for (Strategy s :
       {Strategy::kEntropy, Strategy::kMargin, Strategy::kLeastConfidence}) {
    CodingSession session(TwoCodes(), {"d1", "d2"}, s, 1);
    CHECK(session.NextQuery(post) == "d2");
  }
  CodingSession single(TwoCodes(), {"d1"}, Strategy::kRandom, 1);
  CHECK(single.NextQuery({}) == "d1");
}

TEST_CASE("entropy choice equals a brute-force scan") {
  std::map<std::string, std::vector<double>> post;
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "c" + std::to_string(i);
    const double p = 0.05 + 0.09 * ((i * 7) % 10);
    post[id] = {p, (1 - p) * 0.6, (1 - p) * 0.4};
    ids.push_back(id);
  }
  std::string best;
  double best_h = -1;
  for (const auto &id : ids) {
    double h = 0;
    for (double p : post[id]) h -= p > 0 ? p * std::log(p) : 0;
    if (h > best_h) {
      best_h = h;
      best = id;
    }
  }
  Codebook cb = TwoCodes();
  cb.codes.push_back({"other", "Other", ""});
  CodingSession session(cb, ids, Strategy::kEntropy, 3);
  CHECK(session.NextQuery(post) == best);
}

TEST_CASE("ties go to the smallest document id") {
  CodingSession session(TwoCodes(), {"b", "a", "c"}, Strategy::kMargin, 1);
  CHECK(session.NextQuery({{"a", {0.5, 0.5}}, {"b", {0.5, 0.5}},
                           {"c", {0.5, 0.5}}}) == "a");
}

TEST_CASE("recording labels moves documents out of the queue") {
  CodingSession session(TwoCodes(), {"a", "b", "c"}, Strategy::kEntropy, 1);
  session.RecordLabel("b", "water", "ana", "t0");
  CHECK(session.labeled().count("b"));
  CHECK(std::find(session.queue().begin(), session.queue().end(), "b") ==
        session.queue().end());
  CHECK(session.retrain_needed());
  CHECK_THROWS_AS(session.RecordLabel("a", "nope"), Error);
  CHECK_THROWS_AS(session.RecordLabel("zz", "water"), NotFound);
  CHECK_THROWS_AS(session.RecordLabel("b", "finance"), Error);
  session.RecordLabel("b", "finance", "ana", "t1", true);
  CHECK(session.labeled().at("b").code == "finance");
  CHECK(session.NextQuery({{"a", {0.5, 0.5}}, {"c", {0.9, 0.1}}}) == "a");
}

TEST_CASE("session state equals a replay of its transitions") {
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e", "f"};
  CodingSession live(TwoCodes(), ids, Strategy::kRandom, 17);
  std::vector<std::pair<std::string, std::string>> log;
  for (int i = 0; i < 5; ++i) {
    const auto doc = live.NextQuery({});
    const std::string code = i % 2 ? "water" : "finance";
    live.RecordLabel(doc, code, "ana", "t" + std::to_string(i));
    log.emplace_back(doc, code);
  }
  CodingSession replay(TwoCodes(), ids, Strategy::kRandom, 17);
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(replay.NextQuery({}) == log[i].first);
    replay.RecordLabel(log[i].first, log[i].second, "ana",
                       "t" + std::to_string(i));
  }
  CHECK(replay.ToJson() == live.ToJson());
  CHECK(replay.LabelsCsv() == live.LabelsCsv());
  // The serialized session continues with the same random stream.
  auto restored = CodingSession::FromJson(live.ToJson());
  CHECK(restored.NextQuery({}) == live.NextQuery({}));
}

TEST_CASE("labels csv") {
  CodingSession s(TwoCodes(), {"a", "b", "c"}, Strategy::kEntropy, 1);
  s.RecordLabel("a", "water", "ana", "t0");
  s.RecordLabel("c", "finance", "bo", "t1");
  const auto csv = s.LabelsCsv();
  CHECK(csv ==
        "doc_id,code_id,author,timestamp\na,water,ana,t0\nc,finance,bo,t1\n");
  CHECK(ParseLabelsCsv(csv) == LabelMap{{"a", "water"}, {"c", "finance"}});
}

Matrix<int> Confusion(std::vector<std::vector<int>> rows) {
  Matrix<int> m(rows.size(), rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

TEST_CASE("harmonic mean on a hand-built confusion matrix") {
  // Each class: TP=1, FP=1, FN=1.
  const auto r = ReportFromConfusion({"a", "b"}, Confusion({{1, 1}, {1, 1}}));
  for (const auto &c : r.per_class) {
    CHECK(c.precision == 0.5);
    CHECK(c.recall == 0.5);
    CHECK(c.f1 == 0.5);
    CHECK(c.support == 2);
  }
  CHECK(r.macro_f1 == 0.5);
  CHECK(r.micro_f1 == 0.5);
}

TEST_CASE("constant predictor zero-denominator conventions") {
  // Gold: 3 a, 2 b, 1 c; everything predicted a.
  const auto r = ReportFromConfusion(
      {"a", "b", "c"}, Confusion({{3, 0, 0}, {2, 0, 0}, {1, 0, 0}}));
  CHECK(r.per_class[0].precision == 0.5);
  CHECK(r.per_class[0].recall == 1.0);
  CHECK(r.per_class[0].f1 == 2.0 / 3.0);
  for (int c = 1; c < 3; ++c) {
    CHECK(r.per_class[c].precision == 0.0);
    CHECK(r.per_class[c].recall == 0.0);
    CHECK(r.per_class[c].f1 == 0.0);
  }
  CHECK(r.macro_precision == 0.5 / 3.0);
  CHECK(r.macro_recall == 1.0 / 3.0);
  CHECK(r.macro_f1 == (2.0 / 3.0) / 3.0);
  CHECK(r.micro_precision == 0.5);
  CHECK(r.micro_recall == 0.5);
  CHECK(r.micro_f1 == 0.5);
}

TEST_CASE("a class never gold nor predicted scores zero") {
  const auto r = ReportFromConfusion({"a", "b"}, Confusion({{2, 0}, {0, 0}}));
  CHECK(r.per_class[0].f1 == 1.0);
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].recall == 0.0);
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK(r.macro_f1 == 0.5);
}

TEST_CASE("report serialization") {
  const auto r = ReportFromConfusion({"a", "b"}, Confusion({{3, 1}, {0, 2}}),
                                     2, 9);
  const auto back = EvalReport::FromJson(r.ToJson());
  CHECK(back.ToJson() == r.ToJson());
  CHECK(back.confusion == r.confusion);
  CHECK(r.ToCsv().rfind("code,precision,recall,f1,support\n", 0) == 0);
}

TEST_CASE("perfectly separable cross-validation") {
  std::vector<std::pair<std::string, std::string>> rows;
  LabelMap labels;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "d" + std::to_string(10 + i);
    rows.emplace_back(id, i % 2 ? "water river flood" : "fund loan bank");
    labels[id] = i % 2 ? "water" : "finance";
  }
  auto s = Make(rows);
  const auto r = Evaluate(s.dtm, labels, TwoCodes(), 3, 5);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.folds == 3);
  CHECK(r.seed == 5);
  int total = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    int row = 0;
    for (std::size_t p = 0; p < 2; ++p) row += r.confusion(c, p);
    CHECK(row == r.per_class[c].support);
    total += row;
  }
  CHECK(total == 12);
  CHECK_THROWS_AS(Evaluate(s.dtm, labels, TwoCodes(), 7, 5), Error);
  CHECK_THROWS_AS(Evaluate(s.dtm, labels, TwoCodes(), 1, 5), Error);
}

TEST_CASE("evaluation ignores document order") {
  const auto corpus = synth::SeparableCorpus(4, 40);
  auto docs = corpus.documents;
  const auto v = BuildVocabulary(docs, AnalysisParams{});
  const auto a = Evaluate(BuildDtm(docs, v), corpus.gold, corpus.codebook, 4, 8);
  std::reverse(docs.begin(), docs.end());
  const auto b = Evaluate(BuildDtm(docs, v), corpus.gold, corpus.codebook, 4, 8);
  CHECK(a.ToJson() == b.ToJson());
}

TEST_CASE("simulation with zero budget has only the seed point") {
  const auto corpus = synth::SeparableCorpus(2, 60);
  const auto v = BuildVocabulary(corpus.documents, AnalysisParams{});
  const auto dtm = BuildDtm(corpus.documents, v);
  SimulationOptions opt;
  opt.budget = 0;
  const auto curve = SimulateActiveLearning(dtm, corpus.gold, corpus.codebook, opt);
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].labels == 2);
}

TEST_CASE("strategies share the seed point and are deterministic") {
  const auto corpus = synth::SeparableCorpus(2, 60);
  const auto v = BuildVocabulary(corpus.documents, AnalysisParams{});
  const auto dtm = BuildDtm(corpus.documents, v);
  SimulationOptions opt;
  opt.budget = 10;
  opt.seed = 4;
  opt.strategy = Strategy::kEntropy;
  const auto e = SimulateActiveLearning(dtm, corpus.gold, corpus.codebook, opt);
  opt.strategy = Strategy::kRandom;
  const auto r = SimulateActiveLearning(dtm, corpus.gold, corpus.codebook, opt);
  CHECK(e.front() == r.front());
  CHECK(e.size() == 11);
  CHECK(SimulateActiveLearning(dtm, corpus.gold, corpus.codebook, opt) == r);
  opt.budget = 1000;
  CHECK_THROWS_AS(
      SimulateActiveLearning(dtm, corpus.gold, corpus.codebook, opt), Error);
}

TEST_CASE("labels to accuracy") {
  const std::vector<CurvePoint> c = {{2, 0.5}, {3, 0.8}, {4, 0.95}};
  CHECK(LabelsToAccuracy(c, 0.9) == 4);
  CHECK_FALSE(LabelsToAccuracy(c, 0.99));
  CHECK(CurveCsv(c) == "labels,accuracy\n2,0.5\n3,0.8\n4,0.95\n");
}

TEST_CASE("codebook parsing and checks") {
  const auto cb = Codebook::FromCsv("id,name\nfin,Finance\nwat,Water\n");
  CHECK(cb.Ids() == std::vector<std::string>{"fin", "wat"});
  CHECK(cb.IndexOf("wat") == 1);
  CHECK(Codebook::FromJson(cb.ToJson()).codes == cb.codes);
  Codebook dup;
  dup.codes = {{"x", "X", ""}, {"x", "Y", ""}};
  CHECK_THROWS_AS(dup.Check(), Error);
}

}  // namespace
}  // namespace cmwb
