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

#ifndef CMWB_CLASSIFY_H_
#define CMWB_CLASSIFY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmwb/matrix.h"
#include "cmwb/pipeline.h"
#include "cmwb/rng.h"
#include "json.hpp"

namespace cmwb {

struct Code {
  std::string id;
  std::string name;
  std::string description;

  bool operator==(const Code &) const = default;
};

struct Codebook {
  std::vector<Code> codes;

  // Position of a code id, or -1.
  int IndexOf(std::string_view id) const;
  std::vector<std::string> Ids() const;
  // Throws on duplicate or empty ids.
  void Check() const;

  nlohmann::json ToJson() const;
  static Codebook FromJson(const nlohmann::json &j);
  // CSV with header id,name[,description].
  static Codebook FromCsv(std::string_view data);
};

// document id -> code id
using LabelMap = std::map<std::string, std::string>;

// Reads doc_id,code_id[,...] rows (header required).
LabelMap ParseLabelsCsv(std::string_view data);

// Anything that maps a document row to a posterior over codes.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual const std::vector<std::string> &codes() const = 0;
  // Unnormalized log scores, one per code.
  virtual std::vector<double> LogScores(const DocRow &row) const = 0;
};

struct Prediction {
  std::string code;
  int code_index = 0;
  std::vector<double> posterior;  // codebook order, sums to 1
};

// Normalizes in probability space (log-sum-exp); argmax with ties broken
// by codebook order.
Prediction Predict(const TextClassifier &classifier, const DocRow &row);
std::vector<double> NormalizeLogScores(const std::vector<double> &log_scores);

// Multinomial naive Bayes with add-one smoothing over the matrix vocabulary.
class NaiveBayesModel : public TextClassifier {
 public:
  const std::vector<std::string> &codes() const override { return codes_; }
  std::vector<double> LogScores(const DocRow &row) const override;

  const std::vector<double> &log_prior() const { return log_prior_; }
  // codes x vocabulary
  const Matrix<double> &log_likelihood() const { return log_likelihood_; }

  nlohmann::json ToJson() const;

 private:
  friend NaiveBayesModel TrainNaiveBayes(const DocTermMatrix &,
                                         const LabelMap &, const Codebook &);
  std::vector<std::string> codes_;
  std::vector<double> log_prior_;
  Matrix<double> log_likelihood_;
};

// Needs at least two codes, each with at least one labeled document; the
// error lists the codes without any.
NaiveBayesModel TrainNaiveBayes(const DocTermMatrix &dtm,
                                const LabelMap &labeled,
                                const Codebook &codebook);

enum class Strategy { kEntropy, kMargin, kLeastConfidence, kRandom };

std::string_view StrategyName(Strategy s);
Strategy ParseStrategy(std::string_view name);

// Larger is more informative. kRandom has no score.
double InformativenessScore(Strategy strategy,
                            const std::vector<double> &posterior);

struct LabelEntry {
  std::string code;
  std::string author;
  std::string timestamp;

  bool operator==(const LabelEntry &) const = default;
};

struct ClassMetrics {
  std::string code;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;  // gold count
};

struct EvalReport {
  std::vector<std::string> codes;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  Matrix<int> confusion;  // rows gold, columns predicted
  int folds = 0;
  std::uint64_t seed = 0;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json &j);
  // code,precision,recall,f1,support plus macro and micro rows.
  std::string ToCsv() const;
};

// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); each is 0 when its
// denominator is 0. Macro values are unweighted means over classes.
EvalReport ReportFromConfusion(std::vector<std::string> codes,
                               Matrix<int> confusion, int folds = 0,
                               std::uint64_t seed = 0);

// Stratified k-fold cross-validation. Each class's documents are sorted by
// id and then shuffled with `seed`, so input order never matters.
EvalReport Evaluate(const DocTermMatrix &dtm, const LabelMap &labeled,
                    const Codebook &codebook, int folds, std::uint64_t seed);

// One coder's labeling stream over a fixed candidate set.
class CodingSession {
 public:
  CodingSession(Codebook codebook, std::vector<std::string> candidates,
                Strategy strategy, std::uint64_t seed);

  const Codebook &codebook() const { return codebook_; }
  Strategy strategy() const { return strategy_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::string, LabelEntry> &labeled() const { return labeled_; }
  // Unlabeled candidates, sorted by id.
  const std::vector<std::string> &queue() const { return queue_; }
  bool retrain_needed() const { return retrain_needed_; }
  // Incremented by every label change.
  int label_version() const { return label_version_; }
  std::vector<EvalReport> &metrics_history() { return metrics_history_; }
  const std::vector<EvalReport> &metrics_history() const {
    return metrics_history_;
  }

  LabelMap Labels() const;

  // Moves `doc` from the queue to the labeled set. Relabeling an already
  // labeled document requires `overwrite`.
  void RecordLabel(const std::string &doc, const std::string &code,
                   const std::string &author = "",
                   const std::string &timestamp = "", bool overwrite = false);

  // Picks the queued document the strategy finds most informative; ties go
  // to the smaller id. Every queued document needs a posterior unless the
  // strategy is kRandom.
  std::string NextQuery(
      const std::map<std::string, std::vector<double>> &posteriors);

  void MarkTrained() { retrain_needed_ = false; }

  nlohmann::json ToJson() const;
  static CodingSession FromJson(const nlohmann::json &j);

  // doc_id,code_id,author,timestamp sorted by doc_id.
  std::string LabelsCsv() const;

 private:
  Codebook codebook_;
  Strategy strategy_;
  std::uint64_t seed_;
  Rng rng_;
  std::map<std::string, LabelEntry> labeled_;
  std::vector<std::string> queue_;
  bool retrain_needed_ = false;
  int label_version_ = 0;
  std::vector<EvalReport> metrics_history_;
};

struct CurvePoint {
  int labels = 0;
  double accuracy = 0.0;

  bool operator==(const CurvePoint &) const = default;
};

struct SimulationOptions {
  Strategy strategy = Strategy::kEntropy;
  int budget = 0;
  std::uint64_t seed = 1;
  double holdout_fraction = 0.3;
};

// Learning curve of a simulated coder: a stratified holdout is fixed, the
// pool's first document (by id) of each class seeds the labels, and each
// step queries one document, reveals its gold code and retrains.
std::vector<CurvePoint> SimulateActiveLearning(const DocTermMatrix &dtm,
                                               const LabelMap &gold,
                                               const Codebook &codebook,
                                               const SimulationOptions &options);

// Labels used at the first point reaching `target` accuracy.
std::optional<int> LabelsToAccuracy(const std::vector<CurvePoint> &curve,
                                    double target);

std::string CurveCsv(const std::vector<CurvePoint> &curve);

}  // namespace cmwb

#endif  // CMWB_CLASSIFY_H_
