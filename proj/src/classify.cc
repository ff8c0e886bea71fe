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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "cmwb/csv.h"
#include "cmwb/error.h"

namespace cmwb {

int Codebook::IndexOf(std::string_view id) const {
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> Codebook::Ids() const {
  std::vector<std::string> ids;
  for (const auto &c : codes) ids.push_back(c.id);
  return ids;
}

void Codebook::Check() const {
  std::set<std::string> seen;
  for (const auto &c : codes) {
    if (c.id.empty()) throw Error("codebook: empty code id");
    if (!seen.insert(c.id).second) {
      throw Error("codebook: duplicate code id '" + c.id + "'");
    }
  }
}

nlohmann::json Codebook::ToJson() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto &c : codes) {
    j.push_back({{"id", c.id}, {"name", c.name}, {"description", c.description}});
  }
  return j;
}

Codebook Codebook::FromJson(const nlohmann::json &j) {
  if (!j.is_array()) {
    throw ValidationError("codebook", "must be an array of codes");
  }
  Codebook cb;
  std::vector<FieldError> errors;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto &x = j[i];
    const std::string path = "codebook[" + std::to_string(i) + "]";
    if (!x.is_object() || !x.contains("id") || !x["id"].is_string()) {
      errors.push_back({path + ".id", "required string"});
      continue;
    }
    Code c;
    c.id = x["id"].get<std::string>();
    c.name = x.value("name", c.id);
    c.description = x.value("description", "");
    cb.codes.push_back(std::move(c));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  cb.Check();
  return cb;
}

Codebook Codebook::FromCsv(std::string_view data) {
  const auto rows = csv::Parse(data);
  if (rows.empty()) throw Error("codebook CSV is empty");
  const auto &h = rows.front();
  auto col = [&](const char *name) {
    auto it = std::find(h.begin(), h.end(), name);
    return it == h.end() ? -1 : static_cast<int>(it - h.begin());
  };
  const int id = col("id"), name = col("name"), desc = col("description");
  if (id < 0) throw Error("codebook CSV needs an 'id' column");
  Codebook cb;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Code c;
    c.id = rows[r][id];
    c.name = name >= 0 ? rows[r][name] : c.id;
    c.description = desc >= 0 ? rows[r][desc] : "";
    cb.codes.push_back(std::move(c));
  }
  cb.Check();
  return cb;
}

LabelMap ParseLabelsCsv(std::string_view data) {
  const auto rows = csv::Parse(data);
  if (rows.empty()) throw Error("labels CSV is empty");
  const auto &h = rows.front();
  auto doc = std::find(h.begin(), h.end(), "doc_id");
  auto code = std::find(h.begin(), h.end(), "code_id");
  if (doc == h.end() || code == h.end()) {
    throw Error("labels CSV needs doc_id and code_id columns");
  }
  const auto di = doc - h.begin(), ci = code - h.begin();
  LabelMap labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (!labels.emplace(rows[r][di], rows[r][ci]).second) {
      throw Error("labels CSV: document '" + rows[r][di] +
                  "' is labeled twice");
    }
  }
  return labels;
}

std::vector<double> NormalizeLogScores(const std::vector<double> &log_scores) {
  const double top = *std::max_element(log_scores.begin(), log_scores.end());
  std::vector<double> p(log_scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_scores[i] - top);
    sum += p[i];
  }
  for (double &x : p) x /= sum;
  return p;
}

Prediction Predict(const TextClassifier &classifier, const DocRow &row) {
  const auto scores = classifier.LogScores(row);
  Prediction pred;
  pred.posterior = NormalizeLogScores(scores);
  // Argmax over the log scores; strict comparison keeps the first code.
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[pred.code_index]) {
      pred.code_index = static_cast<int>(i);
    }
  }
  pred.code = classifier.codes()[pred.code_index];
  return pred;
}

std::vector<double> NaiveBayesModel::LogScores(const DocRow &row) const {
  std::vector<double> scores = log_prior_;
  for (std::size_t c = 0; c < codes_.size(); ++c) {
    for (const auto &[term, count] : row.counts) {
      if (term < 0 || static_cast<std::size_t>(term) >= log_likelihood_.cols()) {
        continue;
      }
      scores[c] += count * log_likelihood_(c, term);
    }
  }
  return scores;
}

nlohmann::json NaiveBayesModel::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t c = 0; c < codes_.size(); ++c) {
    auto r = log_likelihood_.row(c);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"codes", codes_}, {"log_prior", log_prior_},
          {"log_likelihood", rows}};
}

NaiveBayesModel TrainNaiveBayes(const DocTermMatrix &dtm,
                                const LabelMap &labeled,
                                const Codebook &codebook) {
  codebook.Check();
  if (codebook.codes.size() < 2) {
    throw Error("training needs at least two codes");
  }
  const std::size_t c_count = codebook.codes.size();
  const auto v = static_cast<std::size_t>(dtm.vocab_size);
  std::vector<int> docs_per_code(c_count, 0);
  Matrix<double> term_counts(c_count, v, 0.0);
  std::vector<double> totals(c_count, 0.0);
  for (const auto &[doc, code] : labeled) {
    const int ci = codebook.IndexOf(code);
    if (ci < 0) throw Error("unknown code '" + code + "' on '" + doc + "'");
    const DocRow *row = dtm.Find(doc);
    if (row == nullptr) throw NotFound("unknown document '" + doc + "'");
    ++docs_per_code[ci];
    for (const auto &[term, count] : row->counts) {
      term_counts(ci, term) += count;
      totals[ci] += count;
    }
  }
  std::string missing;
  for (std::size_t c = 0; c < c_count; ++c) {
    if (docs_per_code[c] == 0) {
      missing += (missing.empty() ? "" : ", ") + codebook.codes[c].id;
    }
  }
  if (!missing.empty()) {
    throw Error("no labeled documents for code(s): " + missing);
  }

  NaiveBayesModel model;
  model.codes_ = codebook.Ids();
  const double n = static_cast<double>(labeled.size());
  model.log_prior_.resize(c_count);
  model.log_likelihood_ = Matrix<double>(c_count, v);
  for (std::size_t c = 0; c < c_count; ++c) {
    model.log_prior_[c] = std::log(docs_per_code[c] / n);
    const double denom = totals[c] + static_cast<double>(v);
    for (std::size_t w = 0; w < v; ++w) {
      model.log_likelihood_(c, w) = std::log((term_counts(c, w) + 1.0) / denom);
    }
  }
  return model;
}

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kEntropy: return "ENTROPY";
    case Strategy::kMargin: return "MARGIN";
    case Strategy::kLeastConfidence: return "LEAST_CONFIDENCE";
    case Strategy::kRandom: return "RANDOM";
  }
  return "ENTROPY";
}

Strategy ParseStrategy(std::string_view name) {
  std::string upper(name);
  for (char &c : upper) c = static_cast<char>(c == '-' ? '_' : std::toupper(c));
  if (upper == "ENTROPY") return Strategy::kEntropy;
  if (upper == "MARGIN") return Strategy::kMargin;
  if (upper == "LEAST_CONFIDENCE") return Strategy::kLeastConfidence;
  if (upper == "RANDOM") return Strategy::kRandom;
  throw Error("unknown strategy '" + std::string(name) +
              "' (expected entropy, margin, least_confidence or random)");
}

double InformativenessScore(Strategy strategy,
                            const std::vector<double> &posterior) {
  switch (strategy) {
    case Strategy::kEntropy: {
      double h = 0.0;
      for (double p : posterior) {
        if (p > 0.0) h -= p * std::log(p);
      }
      return h;
    }
    case Strategy::kMargin: {
      double first = 0.0, second = 0.0;
      for (double p : posterior) {
        if (p > first) {
          second = first;
          first = p;
        } else if (p > second) {
          second = p;
        }
      }
      return -(first - second);
    }
    case Strategy::kLeastConfidence:
      return -*std::max_element(posterior.begin(), posterior.end());
    case Strategy::kRandom:
      break;
  }
  throw Error("the random strategy has no informativeness score");
}

namespace {

double Ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

EvalReport ReportFromConfusion(std::vector<std::string> codes,
                               Matrix<int> confusion, int folds,
                               std::uint64_t seed) {
  const std::size_t c = codes.size();
  if (confusion.rows() != c || confusion.cols() != c) {
    throw Error("confusion matrix shape does not match the codes");
  }
  EvalReport report;
  double tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (std::size_t i = 0; i < c; ++i) {
    double tp = confusion(i, i), fp = 0, fn = 0;
    int support = 0;
    for (std::size_t j = 0; j < c; ++j) {
      support += confusion(i, j);
      if (j != i) {
        fn += confusion(i, j);
        fp += confusion(j, i);
      }
    }
    ClassMetrics m;
    m.code = codes[i];
    m.support = support;
    m.precision = Ratio(tp, tp + fp);
    m.recall = Ratio(tp, tp + fn);
    // 2PR/(P+R) in count form, so the division rounds once.
    m.f1 = Ratio(2.0 * tp, 2.0 * tp + fp + fn);
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
    tp_sum += tp, fp_sum += fp, fn_sum += fn;
    report.per_class.push_back(m);
  }
  if (c > 0) {
    report.macro_precision /= static_cast<double>(c);
    report.macro_recall /= static_cast<double>(c);
    report.macro_f1 /= static_cast<double>(c);
  }
  report.micro_precision = Ratio(tp_sum, tp_sum + fp_sum);
  report.micro_recall = Ratio(tp_sum, tp_sum + fn_sum);
  report.micro_f1 = Ratio(2.0 * tp_sum, 2.0 * tp_sum + fp_sum + fn_sum);
  report.codes = std::move(codes);
  report.confusion = std::move(confusion);
  report.folds = folds;
  report.seed = seed;
  return report;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto &m : per_class) {
    classes.push_back({{"code", m.code},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support}});
  }
  nlohmann::json matrix = nlohmann::json::array();
  for (std::size_t r = 0; r < confusion.rows(); ++r) {
    auto row = confusion.row(r);
    matrix.push_back(std::vector<int>(row.begin(), row.end()));
  }
  return {{"codes", codes},
          {"per_class", classes},
          {"macro", {{"precision", macro_precision},
                     {"recall", macro_recall},
                     {"f1", macro_f1}}},
          {"micro", {{"precision", micro_precision},
                     {"recall", micro_recall},
                     {"f1", micro_f1}}},
          {"confusion", matrix},
          {"folds", folds},
          {"seed", seed}};
}

EvalReport EvalReport::FromJson(const nlohmann::json &j) {
  auto codes = j.at("codes").get<std::vector<std::string>>();
  Matrix<int> confusion(codes.size(), codes.size());
  const auto &rows = j.at("confusion");
  for (std::size_t r = 0; r < codes.size(); ++r) {
    for (std::size_t c = 0; c < codes.size(); ++c) {
      confusion(r, c) = rows.at(r).at(c).get<int>();
    }
  }
  return ReportFromConfusion(std::move(codes), std::move(confusion),
                             j.at("folds").get<int>(),
                             j.at("seed").get<std::uint64_t>());
}

std::string EvalReport::ToCsv() const {
  std::string out = "code,precision,recall,f1,support\n";
  auto num = [](double x) { return csv::FormatSignificant(x, 9); };
  int total = 0;
  for (const auto &m : per_class) {
    out += csv::FormatRow({m.code, num(m.precision), num(m.recall), num(m.f1),
                           std::to_string(m.support)});
    total += m.support;
  }
  out += csv::FormatRow({"(macro)", num(macro_precision), num(macro_recall),
                         num(macro_f1), std::to_string(total)});
  out += csv::FormatRow({"(micro)", num(micro_precision), num(micro_recall),
                         num(micro_f1), std::to_string(total)});
  return out;
}

EvalReport Evaluate(const DocTermMatrix &dtm, const LabelMap &labeled,
                    const Codebook &codebook, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error("folds must be at least 2");
  codebook.Check();
  const std::size_t c_count = codebook.codes.size();
  std::vector<std::vector<std::string>> by_code(c_count);
  for (const auto &[doc, code] : labeled) {  // map order: sorted ids
    const int ci = codebook.IndexOf(code);
    if (ci < 0) throw Error("unknown code '" + code + "' on '" + doc + "'");
    by_code[ci].push_back(doc);
  }
  for (std::size_t c = 0; c < c_count; ++c) {
    if (by_code[c].size() < static_cast<std::size_t>(folds)) {
      throw Error("code '" + codebook.codes[c].id + "' has " +
                  std::to_string(by_code[c].size()) +
                  " labeled documents, fewer than " + std::to_string(folds) +
                  " folds");
    }
  }
  Rng rng(seed);
  std::map<std::string, int> fold_of;
  for (auto &docs : by_code) {
    rng.Shuffle(&docs);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      fold_of[docs[i]] = static_cast<int>(i % folds);
    }
  }
  Matrix<int> confusion(c_count, c_count, 0);
  for (int f = 0; f < folds; ++f) {
    LabelMap train;
    for (const auto &[doc, code] : labeled) {
      if (fold_of[doc] != f) train.emplace(doc, code);
    }
    const auto model = TrainNaiveBayes(dtm, train, codebook);
    for (const auto &[doc, code] : labeled) {
      if (fold_of[doc] != f) continue;
      const auto pred = Predict(model, *dtm.Find(doc));
      ++confusion(codebook.IndexOf(code), pred.code_index);
    }
  }
  return ReportFromConfusion(codebook.Ids(), std::move(confusion), folds, seed);
}

CodingSession::CodingSession(Codebook codebook,
                             std::vector<std::string> candidates,
                             Strategy strategy, std::uint64_t seed)
    : codebook_(std::move(codebook)),
      strategy_(strategy),
      seed_(seed),
      rng_(seed),
      queue_(std::move(candidates)) {
  codebook_.Check();
  std::sort(queue_.begin(), queue_.end());
  queue_.erase(std::unique(queue_.begin(), queue_.end()), queue_.end());
}

LabelMap CodingSession::Labels() const {
  LabelMap out;
  for (const auto &[doc, entry] : labeled_) out.emplace(doc, entry.code);
  return out;
}

void CodingSession::RecordLabel(const std::string &doc,
                                const std::string &code,
                                const std::string &author,
                                const std::string &timestamp, bool overwrite) {
  if (codebook_.IndexOf(code) < 0) {
    throw Error("unknown code '" + code + "'");
  }
  if (auto it = labeled_.find(doc); it != labeled_.end()) {
    if (!overwrite) {
      throw Error("document '" + doc +
                  "' is already labeled; pass overwrite to relabel");
    }
    it->second = {code, author, timestamp};
  } else {
    auto q = std::lower_bound(queue_.begin(), queue_.end(), doc);
    if (q == queue_.end() || *q != doc) {
      throw NotFound("unknown document '" + doc + "'");
    }
    queue_.erase(q);
    labeled_.emplace(doc, LabelEntry{code, author, timestamp});
  }
  retrain_needed_ = true;
  ++label_version_;
}

std::string CodingSession::NextQuery(
    const std::map<std::string, std::vector<double>> &posteriors) {
  if (queue_.empty()) throw Error("the query queue is empty");
  if (strategy_ == Strategy::kRandom) {
    return queue_[rng_.Below(queue_.size())];
  }
  const std::string *best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto &doc : queue_) {
    auto it = posteriors.find(doc);
    if (it == posteriors.end()) {
      throw Error("no posterior for queued document '" + doc + "'");
    }
    const double score = InformativenessScore(strategy_, it->second);
    if (best == nullptr || score > best_score) {
      best = &doc;
      best_score = score;
    }
  }
  return *best;
}

nlohmann::json CodingSession::ToJson() const {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto &[doc, e] : labeled_) {
    labels[doc] = {{"code", e.code},
                   {"author", e.author},
                   {"timestamp", e.timestamp}};
  }
  nlohmann::json history = nlohmann::json::array();
  for (const auto &r : metrics_history_) history.push_back(r.ToJson());
  return {{"codebook", codebook_.ToJson()},
          {"strategy", StrategyName(strategy_)},
          {"seed", seed_},
          {"rng_draws", rng_.draws()},
          {"labeled", labels},
          {"queue", queue_},
          {"retrain_needed", retrain_needed_},
          {"label_version", label_version_},
          {"metrics_history", history}};
}

CodingSession CodingSession::FromJson(const nlohmann::json &j) {
  CodingSession s(Codebook::FromJson(j.at("codebook")),
                  j.at("queue").get<std::vector<std::string>>(),
                  ParseStrategy(j.at("strategy").get<std::string>()),
                  j.at("seed").get<std::uint64_t>());
  s.rng_.Skip(j.at("rng_draws").get<std::uint64_t>());
  for (const auto &[doc, e] : j.at("labeled").items()) {
    s.labeled_.emplace(doc, LabelEntry{e.at("code").get<std::string>(),
                                       e.at("author").get<std::string>(),
                                       e.at("timestamp").get<std::string>()});
  }
  s.retrain_needed_ = j.at("retrain_needed").get<bool>();
  s.label_version_ = j.at("label_version").get<int>();
  for (const auto &r : j.at("metrics_history")) {
    s.metrics_history_.push_back(EvalReport::FromJson(r));
  }
  return s;
}

std::string CodingSession::LabelsCsv() const {
  std::string out = "doc_id,code_id,author,timestamp\n";
  for (const auto &[doc, e] : labeled_) {
    out += csv::FormatRow({doc, e.code, e.author, e.timestamp});
  }
  return out;
}

std::vector<CurvePoint> SimulateActiveLearning(
    const DocTermMatrix &dtm, const LabelMap &gold, const Codebook &codebook,
    const SimulationOptions &options) {
  codebook.Check();
  if (options.budget < 0) throw Error("budget must not be negative");
  for (const auto &row : dtm.rows) {
    if (!gold.contains(row.doc_id)) {
      throw Error("gold labels do not cover document '" + row.doc_id + "'");
    }
  }
  const std::size_t c_count = codebook.codes.size();
  std::vector<std::vector<std::string>> by_code(c_count);
  for (const auto &row : dtm.rows) {
    const std::string &code = gold.at(row.doc_id);
    const int ci = codebook.IndexOf(code);
    if (ci < 0) throw Error("unknown gold code '" + code + "'");
    by_code[ci].push_back(row.doc_id);
  }

  Rng split(options.seed);
  std::vector<std::string> holdout, pool;
  for (auto &docs : by_code) {
    std::sort(docs.begin(), docs.end());
    split.Shuffle(&docs);
    const auto take = static_cast<std::size_t>(
        std::floor(options.holdout_fraction * docs.size() + 0.5));
    holdout.insert(holdout.end(), docs.begin(), docs.begin() + take);
    pool.insert(pool.end(), docs.begin() + take, docs.end());
  }
  std::sort(holdout.begin(), holdout.end());
  std::sort(pool.begin(), pool.end());
  if (holdout.empty()) throw Error("holdout is empty");

  CodingSession session(codebook, pool, options.strategy,
                        options.seed ^ 0x9E3779B97F4A7C15ULL);
  for (std::size_t c = 0; c < c_count; ++c) {
    auto it = std::find_if(pool.begin(), pool.end(), [&](const auto &doc) {
      return gold.at(doc) == codebook.codes[c].id;
    });
    if (it == pool.end()) {
      throw Error("no pool document for code '" + codebook.codes[c].id + "'");
    }
    session.RecordLabel(*it, codebook.codes[c].id);
  }
  if (static_cast<std::size_t>(options.budget) > session.queue().size()) {
    throw Error("budget exhausts the pool (" +
                std::to_string(session.queue().size()) +
                " unlabeled documents available)");
  }

  auto accuracy = [&](const NaiveBayesModel &model) {
    int correct = 0;
    for (const auto &doc : holdout) {
      if (Predict(model, *dtm.Find(doc)).code == gold.at(doc)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(holdout.size());
  };

  std::vector<CurvePoint> curve;
  auto model = TrainNaiveBayes(dtm, session.Labels(), codebook);
  curve.push_back({static_cast<int>(session.labeled().size()), accuracy(model)});
  for (int step = 0; step < options.budget; ++step) {
    std::map<std::string, std::vector<double>> posteriors;
    if (options.strategy != Strategy::kRandom) {
      for (const auto &doc : session.queue()) {
        posteriors[doc] = Predict(model, *dtm.Find(doc)).posterior;
      }
    }
    const std::string doc = session.NextQuery(posteriors);
    session.RecordLabel(doc, gold.at(doc));
    model = TrainNaiveBayes(dtm, session.Labels(), codebook);
    session.MarkTrained();
    curve.push_back(
        {static_cast<int>(session.labeled().size()), accuracy(model)});
  }
  return curve;
}

std::optional<int> LabelsToAccuracy(const std::vector<CurvePoint> &curve,
                                    double target) {
  for (const auto &p : curve) {
    if (p.accuracy >= target) return p.labels;
  }
  return std::nullopt;
}

std::string CurveCsv(const std::vector<CurvePoint> &curve) {
  std::string out = "labels,accuracy\n";
  for (const auto &p : curve) {
    out += std::to_string(p.labels) + "," +
           csv::FormatSignificant(p.accuracy, 9) + "\n";
  }
  return out;
}

}  // namespace cmwb
