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

#ifndef CMWB_TOPICS_H_
#define CMWB_TOPICS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmwb/corpus.h"
#include "cmwb/matrix.h"
#include "cmwb/pipeline.h"
#include "json.hpp"

namespace cmwb {

struct LdaConfig {
  int k = 10;
  double alpha = 5.0;  // 50 / k
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 500;
  std::uint64_t seed = 1;

  // Conventional defaults for `k` topics: alpha = 50/k, beta = 0.01.
  static LdaConfig Defaults(int k);

  std::vector<FieldError> Validate(const std::string &prefix = "") const;
  nlohmann::json ToJson() const;
  static LdaConfig FromJson(const nlohmann::json &j,
                            const std::string &prefix = "");
};

struct TopicLabel {
  int topic = 0;
  std::string label;
  std::string author;
  std::string timestamp;

  bool operator==(const TopicLabel &) const = default;
};

// Active label per topic plus every label ever set, oldest first.
struct TopicLabels {
  std::map<int, TopicLabel> active;
  std::vector<TopicLabel> history;

  nlohmann::json ToJson() const;
  static TopicLabels FromJson(const nlohmann::json &j);
};

struct TopicModel {
  LdaConfig config;
  AnalysisParams params;
  std::vector<std::string> doc_ids;
  std::vector<std::string> terms;
  std::vector<int> term_df;  // document frequency in the fitting corpus

  // Per document, the non-filtered stream tokens: their position in the
  // document's token stream, term index and final topic assignment.
  std::vector<std::vector<int>> positions;
  std::vector<std::vector<int>> words;
  std::vector<std::vector<int>> z;

  Matrix<int> n_dk;  // D x K
  Matrix<int> n_kw;  // K x V
  std::vector<int> n_k;
  Matrix<double> theta;  // D x K
  Matrix<double> phi;    // K x V
  std::vector<double> log_likelihood_trace;  // [0] is the initial state

  TopicLabels labels;

  int num_topics() const { return config.k; }
  int num_docs() const { return static_cast<int>(doc_ids.size()); }
  int vocab_size() const { return static_cast<int>(terms.size()); }
  std::size_t DocIndex(std::string_view doc_id) const;  // throws NotFound
};

// Rebuilds n_dk, n_kw, n_k from z and words, then theta and phi from the
// counts and hyperparameters.
void RecomputeFromAssignments(TopicModel *model);

// True when the stored count tables equal a fresh recount from z.
bool CountsConsistent(const TopicModel &model);

// Joint log p(w, z) of the current assignment under the Dirichlet priors.
double JointLogLikelihood(const TopicModel &model);

// Called after every sweep with (sweep, log-likelihood); return false to
// cancel, which makes FitLda throw cmwb::Cancelled.
using SweepObserver = std::function<bool(int, double)>;

// Collapsed Gibbs sampling. Tokens are initialized uniformly at random and
// resampled in document order; theta/phi come from the final state.
// Deterministic for a given (dtm, config). Throws on an empty or
// all-filtered matrix and on invalid config.
TopicModel FitLda(const DocTermMatrix &dtm, const Vocabulary &vocab,
                  const LdaConfig &config,
                  const SweepObserver &observer = nullptr);

struct TermRelevance {
  std::string term;
  double relevance = 0.0;
};

// relevance = lambda log phi_kw + (1 - lambda) log(phi_kw / p(w)), with p(w)
// the corpus term probability. Terms absent from the corpus are skipped
// when lambda < 1.
std::vector<TermRelevance> TopWords(const TopicModel &model, int topic, int n,
                                    double lambda = 1.0);

struct CoherenceResult {
  std::vector<double> scores;  // per topic
  int skipped_pairs = 0;       // pairs whose conditioning word has D(w) = 0
};

// UMass coherence over the top-m words (lambda = 1) of each topic, with
// document frequencies taken from `dtm`.
CoherenceResult CoherenceUmass(const TopicModel &model,
                               const DocTermMatrix &dtm, int m);

// Same statistic for explicit word lists (term indices, most relevant first).
CoherenceResult CoherenceUmassForWords(
    const std::vector<std::vector<int>> &top_words, const DocTermMatrix &dtm);

struct HighlightSpan {
  text::Span span;
  int topic = 0;
  double weight = 0.0;  // phi_kw / max_w phi_kw
};

// Spans of the document's stream tokens assigned to `topic` whose weight is
// at least `min_weight`. Throws NotFound for documents outside the model.
std::vector<HighlightSpan> Highlight(const TopicModel &model,
                                     const DocTermMatrix &dtm,
                                     std::string_view doc_id, int topic,
                                     double min_weight);

struct TopicShare {
  std::string doc_id;
  double share = 0.0;
};

// Documents with theta_dk >= min_share, largest share first (ties by id).
std::vector<TopicShare> FilterByTopic(const TopicModel &model, int topic,
                                      double min_share);

struct GroupMean {
  std::vector<double> mean_theta;
  int size = 0;
};

inline constexpr const char *kMissingGroup = "(missing)";

// Mean theta per value of a metadata field; documents without the field
// fall into "(missing)".
std::map<std::string, GroupMean> TopicByMetadata(const TopicModel &model,
                                                 const Corpus &corpus,
                                                 std::string_view field);

// Sets the active label and archives the previous one.
TopicLabel LabelTopic(TopicModel *model, int topic, std::string label,
                      std::string author, std::string timestamp);

// File name to content for config.json, theta.csv, phi.csv,
// assignments.csv, labels.json and vocab.csv.
std::map<std::string, std::string> ModelFiles(const TopicModel &model);
// Writes ModelFiles into dir.
void SaveModel(const TopicModel &model, const std::filesystem::path &dir);
// Recomputes every count and estimate from assignments.csv and rejects the
// directory if the stored theta/phi disagree with them.
TopicModel LoadModel(const std::filesystem::path &dir);

std::string ThetaCsv(const TopicModel &model);
std::string PhiCsv(const TopicModel &model);
std::string AssignmentsCsv(const TopicModel &model);

}  // namespace cmwb

#endif  // CMWB_TOPICS_H_
