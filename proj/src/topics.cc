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

#include "cmwb/topics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cmwb/csv.h"
#include "cmwb/error.h"
#include "cmwb/fileutil.h"
#include "cmwb/rng.h"

namespace cmwb {

namespace fs = std::filesystem;

LdaConfig LdaConfig::Defaults(int k) {
  LdaConfig c;
  c.k = k;
  c.alpha = k > 0 ? 50.0 / k : 50.0;
  return c;
}

std::vector<FieldError> LdaConfig::Validate(const std::string &prefix) const {
  std::vector<FieldError> errors;
  if (k < 1) errors.push_back({prefix + "k", "must be at least 1"});
  if (!(alpha > 0.0)) errors.push_back({prefix + "alpha", "must be positive"});
  if (!(beta > 0.0)) errors.push_back({prefix + "beta", "must be positive"});
  if (iterations < 1) {
    errors.push_back({prefix + "iterations", "must be at least 1"});
  }
  if (burn_in < 0 || burn_in >= iterations) {
    errors.push_back({prefix + "burn_in", "must lie in [0, iterations)"});
  }
  return errors;
}

nlohmann::json LdaConfig::ToJson() const {
  return {{"k", k},           {"alpha", alpha},     {"beta", beta},
          {"iterations", iterations}, {"burn_in", burn_in}, {"seed", seed}};
}

LdaConfig LdaConfig::FromJson(const nlohmann::json &j,
                              const std::string &prefix) {
  std::vector<FieldError> errors;
  if (!j.is_object()) throw ValidationError(prefix, "must be an object");
  static const std::set<std::string> kKeys = {"k",          "alpha",
                                              "beta",       "iterations",
                                              "burn_in",    "seed"};
  for (const auto &[key, value] : j.items()) {
    if (!kKeys.contains(key)) errors.push_back({prefix + key, "unknown field"});
  }
  LdaConfig c;
  auto integer = [&](const char *key, auto *out) {
    auto it = j.find(key);
    if (it == j.end()) return false;
    if (!it->is_number_integer()) {
      errors.push_back({prefix + key, "must be an integer"});
      return false;
    }
    *out = it->template get<std::remove_pointer_t<decltype(out)>>();
    return true;
  };
  auto real = [&](const char *key, double *out) {
    auto it = j.find(key);
    if (it == j.end()) return false;
    if (!it->is_number()) {
      errors.push_back({prefix + key, "must be a number"});
      return false;
    }
    *out = it->get<double>();
    return true;
  };
  int k = c.k;
  integer("k", &k);
  c = Defaults(k);
  real("alpha", &c.alpha);
  real("beta", &c.beta);
  integer("iterations", &c.iterations);
  const bool has_burn = integer("burn_in", &c.burn_in);
  if (!has_burn) c.burn_in = std::min(c.burn_in, c.iterations / 2);
  if (auto it = j.find("seed"); it != j.end()) {
    if (it->is_number_unsigned() ||
        (it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      c.seed = it->get<std::uint64_t>();
    } else {
      errors.push_back({prefix + "seed", "must be a non-negative integer"});
    }
  }
  if (errors.empty()) errors = c.Validate(prefix);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

nlohmann::json TopicLabels::ToJson() const {
  auto one = [](const TopicLabel &l) {
    return nlohmann::json{{"topic", l.topic},
                          {"label", l.label},
                          {"author", l.author},
                          {"timestamp", l.timestamp}};
  };
  nlohmann::json active_json = nlohmann::json::array();
  for (const auto &[k, l] : active) active_json.push_back(one(l));
  nlohmann::json history_json = nlohmann::json::array();
  for (const auto &l : history) history_json.push_back(one(l));
  return {{"active", active_json}, {"history", history_json}};
}

TopicLabels TopicLabels::FromJson(const nlohmann::json &j) {
  auto one = [](const nlohmann::json &x) {
    return TopicLabel{x.at("topic").get<int>(), x.at("label").get<std::string>(),
                      x.at("author").get<std::string>(),
                      x.at("timestamp").get<std::string>()};
  };
  TopicLabels labels;
  for (const auto &x : j.at("active")) {
    auto l = one(x);
    labels.active[l.topic] = l;
  }
  for (const auto &x : j.at("history")) labels.history.push_back(one(x));
  return labels;
}

std::size_t TopicModel::DocIndex(std::string_view doc_id) const {
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    if (doc_ids[i] == doc_id) return i;
  }
  throw NotFound("unknown document '" + std::string(doc_id) + "'");
}

namespace {

struct Counts {
  Matrix<int> n_dk;
  Matrix<int> n_kw;
  std::vector<int> n_k;
};

Counts Recount(const TopicModel &m) {
  const std::size_t d = m.doc_ids.size();
  const auto k = static_cast<std::size_t>(m.config.k);
  Counts c{Matrix<int>(d, k), Matrix<int>(k, m.terms.size()),
           std::vector<int>(k, 0)};
  for (std::size_t doc = 0; doc < d; ++doc) {
    for (std::size_t i = 0; i < m.z[doc].size(); ++i) {
      const int t = m.z[doc][i];
      const int w = m.words[doc][i];
      ++c.n_dk(doc, t);
      ++c.n_kw(t, w);
      ++c.n_k[t];
    }
  }
  return c;
}

void Estimate(TopicModel *m) {
  const std::size_t d = m->doc_ids.size();
  const auto k = static_cast<std::size_t>(m->config.k);
  const std::size_t v = m->terms.size();
  const double alpha = m->config.alpha;
  const double beta = m->config.beta;
  m->theta = Matrix<double>(d, k);
  for (std::size_t doc = 0; doc < d; ++doc) {
    const double denom =
        static_cast<double>(m->z[doc].size()) + static_cast<double>(k) * alpha;
    for (std::size_t t = 0; t < k; ++t) {
      m->theta(doc, t) = (m->n_dk(doc, t) + alpha) / denom;
    }
  }
  m->phi = Matrix<double>(k, v);
  for (std::size_t t = 0; t < k; ++t) {
    const double denom = m->n_k[t] + static_cast<double>(v) * beta;
    for (std::size_t w = 0; w < v; ++w) {
      m->phi(t, w) = (m->n_kw(t, w) + beta) / denom;
    }
  }
}

}  // namespace

void RecomputeFromAssignments(TopicModel *model) {
  auto c = Recount(*model);
  model->n_dk = std::move(c.n_dk);
  model->n_kw = std::move(c.n_kw);
  model->n_k = std::move(c.n_k);
  Estimate(model);
}

bool CountsConsistent(const TopicModel &model) {
  const auto c = Recount(model);
  if (!(c.n_dk == model.n_dk && c.n_kw == model.n_kw && c.n_k == model.n_k)) {
    return false;
  }
  for (std::size_t t = 0; t < model.n_kw.rows(); ++t) {
    long sum = 0;
    for (int x : model.n_kw.row(t)) sum += x;
    if (sum != model.n_k[t]) return false;
  }
  return true;
}

double JointLogLikelihood(const TopicModel &m) {
  const std::size_t d = m.doc_ids.size();
  const auto k = static_cast<std::size_t>(m.config.k);
  const std::size_t v = m.terms.size();
  const double alpha = m.config.alpha;
  const double beta = m.config.beta;
  const double vb = static_cast<double>(v) * beta;
  const double ka = static_cast<double>(k) * alpha;
  const double lg_beta = std::lgamma(beta);
  const double lg_alpha = std::lgamma(alpha);
  const double lg_vb = std::lgamma(vb);
  const double lg_ka = std::lgamma(ka);

  // log p(w | z): zero counts contribute lgamma(beta) - lgamma(beta) = 0.
  double ll = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    ll += lg_vb - std::lgamma(m.n_k[t] + vb);
    for (std::size_t w = 0; w < v; ++w) {
      const int c = m.n_kw(t, w);
      if (c > 0) ll += std::lgamma(c + beta) - lg_beta;
    }
  }
  // log p(z)
  for (std::size_t doc = 0; doc < d; ++doc) {
    ll += lg_ka - std::lgamma(static_cast<double>(m.z[doc].size()) + ka);
    for (std::size_t t = 0; t < k; ++t) {
      const int c = m.n_dk(doc, t);
      if (c > 0) ll += std::lgamma(c + alpha) - lg_alpha;
    }
  }
  return ll;
}

TopicModel FitLda(const DocTermMatrix &dtm, const Vocabulary &vocab,
                  const LdaConfig &config, const SweepObserver &observer) {
  if (auto errors = config.Validate(); !errors.empty()) {
    throw ValidationError(std::move(errors));
  }
  if (dtm.rows.empty()) throw Error("document-term matrix is empty");
  if (dtm.vocab_size != vocab.size()) {
    throw Error("document-term matrix does not match the vocabulary");
  }

  TopicModel m;
  m.config = config;
  m.params = vocab.params;
  m.terms = vocab.terms;
  m.term_df = vocab.df;
  const std::size_t d = dtm.rows.size();
  const auto k = static_cast<std::size_t>(config.k);
  const std::size_t v = m.terms.size();
  m.positions.resize(d);
  m.words.resize(d);
  m.z.resize(d);
  std::size_t total = 0;
  for (std::size_t doc = 0; doc < d; ++doc) {
    const auto &row = dtm.rows[doc];
    m.doc_ids.push_back(row.doc_id);
    for (std::size_t p = 0; p < row.stream.size(); ++p) {
      if (row.stream[p].term == kFiltered) continue;
      m.positions[doc].push_back(static_cast<int>(p));
      m.words[doc].push_back(row.stream[p].term);
    }
    total += m.words[doc].size();
  }
  if (total == 0) throw Error("every token is filtered; nothing to model");

  Rng rng(config.seed);
  for (std::size_t doc = 0; doc < d; ++doc) {
    m.z[doc].resize(m.words[doc].size());
    for (auto &t : m.z[doc]) t = static_cast<int>(rng.Below(k));
  }
  auto counts = Recount(m);
  m.n_dk = std::move(counts.n_dk);
  m.n_kw = std::move(counts.n_kw);
  m.n_k = std::move(counts.n_k);
  m.log_likelihood_trace.reserve(config.iterations + 1);
  m.log_likelihood_trace.push_back(JointLogLikelihood(m));

  const double alpha = config.alpha;
  const double beta = config.beta;
  const double vb = static_cast<double>(v) * beta;
  std::vector<double> cumulative(k);
  for (int sweep = 1; sweep <= config.iterations; ++sweep) {
    for (std::size_t doc = 0; doc < d; ++doc) {
      auto &zd = m.z[doc];
      const auto &wd = m.words[doc];
      for (std::size_t i = 0; i < zd.size(); ++i) {
        const int w = wd[i];
        int t = zd[i];
        --m.n_dk(doc, t);
        --m.n_kw(t, w);
        --m.n_k[t];
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          acc += (m.n_dk(doc, j) + alpha) * (m.n_kw(j, w) + beta) /
                 (m.n_k[j] + vb);
          cumulative[j] = acc;
        }
        const double u = rng.Uniform() * acc;
        t = 0;
        while (static_cast<std::size_t>(t) + 1 < k && cumulative[t] <= u) ++t;
        zd[i] = t;
        ++m.n_dk(doc, t);
        ++m.n_kw(t, w);
        ++m.n_k[t];
      }
    }
    const double ll = JointLogLikelihood(m);
    m.log_likelihood_trace.push_back(ll);
    if (observer && !observer(sweep, ll)) throw Cancelled();
  }
  Estimate(&m);
  return m;
}

std::vector<TermRelevance> TopWords(const TopicModel &model, int topic, int n,
                                    double lambda) {
  if (topic < 0 || topic >= model.num_topics()) {
    throw Error("topic " + std::to_string(topic) + " out of range");
  }
  if (n < 1) throw Error("n must be at least 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error("lambda must lie in [0, 1]");
  }
  const std::size_t v = model.terms.size();
  std::vector<double> term_total(v, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < model.n_kw.rows(); ++t) {
    for (std::size_t w = 0; w < v; ++w) term_total[w] += model.n_kw(t, w);
  }
  for (double x : term_total) total += x;

  std::vector<TermRelevance> ranked;
  ranked.reserve(v);
  for (std::size_t w = 0; w < v; ++w) {
    const double phi = model.phi(topic, w);
    double relevance;
    if (lambda == 1.0) {
      relevance = std::log(phi);
    } else {
      if (term_total[w] == 0.0) continue;
      const double p = term_total[w] / total;
      relevance = lambda * std::log(phi) + (1.0 - lambda) * std::log(phi / p);
    }
    ranked.push_back({model.terms[w], relevance});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const TermRelevance &a, const TermRelevance &b) {
              if (a.relevance != b.relevance) return a.relevance > b.relevance;
              return a.term < b.term;
            });
  if (ranked.size() > static_cast<std::size_t>(n)) ranked.resize(n);
  return ranked;
}

CoherenceResult CoherenceUmassForWords(
    const std::vector<std::vector<int>> &top_words, const DocTermMatrix &dtm) {
  std::set<int> wanted;
  for (const auto &words : top_words) wanted.insert(words.begin(), words.end());
  // Document sets per wanted term, as sorted row indices.
  std::map<int, std::vector<int>> docs_of;
  for (int w : wanted) docs_of[w];
  for (std::size_t r = 0; r < dtm.rows.size(); ++r) {
    for (const auto &[term, count] : dtm.rows[r].counts) {
      if (auto it = docs_of.find(term); it != docs_of.end()) {
        it->second.push_back(static_cast<int>(r));
      }
    }
  }
  auto co_df = [&](int a, int b) {
    const auto &x = docs_of[a];
    const auto &y = docs_of[b];
    std::size_t i = 0, j = 0, n = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] < y[j]) {
        ++i;
      } else if (y[j] < x[i]) {
        ++j;
      } else {
        ++n, ++i, ++j;
      }
    }
    return static_cast<double>(n);
  };
  CoherenceResult result;
  for (const auto &words : top_words) {
    double score = 0.0;
    for (std::size_t i = 1; i < words.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double dj = static_cast<double>(docs_of[words[j]].size());
        if (dj == 0.0) {
          ++result.skipped_pairs;
          continue;
        }
        score += std::log((co_df(words[i], words[j]) + 1.0) / dj);
      }
    }
    result.scores.push_back(score);
  }
  return result;
}

CoherenceResult CoherenceUmass(const TopicModel &model,
                               const DocTermMatrix &dtm, int m) {
  if (m < 1) throw Error("m must be at least 1");
  if (m > model.vocab_size()) {
    throw Error("m exceeds the vocabulary size");
  }
  std::vector<std::vector<int>> top(model.num_topics());
  for (int t = 0; t < model.num_topics(); ++t) {
    std::vector<int> order(model.vocab_size());
    for (int w = 0; w < model.vocab_size(); ++w) order[w] = w;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (model.phi(t, a) != model.phi(t, b)) {
        return model.phi(t, a) > model.phi(t, b);
      }
      return model.terms[a] < model.terms[b];
    });
    top[t].assign(order.begin(), order.begin() + m);
  }
  return CoherenceUmassForWords(top, dtm);
}

std::vector<HighlightSpan> Highlight(const TopicModel &model,
                                     const DocTermMatrix &dtm,
                                     std::string_view doc_id, int topic,
                                     double min_weight) {
  if (topic < 0 || topic >= model.num_topics()) {
    throw Error("topic " + std::to_string(topic) + " out of range");
  }
  const std::size_t d = model.DocIndex(doc_id);
  const DocRow *row = dtm.Find(doc_id);
  if (row == nullptr) {
    throw NotFound("document '" + std::string(doc_id) +
                   "' is not in the matrix");
  }
  double max_phi = 0.0;
  for (double p : model.phi.row(topic)) max_phi = std::max(max_phi, p);

  std::vector<HighlightSpan> spans;
  for (std::size_t i = 0; i < model.z[d].size(); ++i) {
    const auto pos = static_cast<std::size_t>(model.positions[d][i]);
    if (pos >= row->stream.size() ||
        row->stream[pos].term != model.words[d][i]) {
      throw Error("token stream of '" + std::string(doc_id) +
                  "' does not match the model");
    }
    if (model.z[d][i] != topic) continue;
    const double weight = model.phi(topic, model.words[d][i]) / max_phi;
    if (weight < min_weight) continue;
    const text::Span span = row->stream[pos].span;
    // Bigram streams overlap their unigrams; keep the first span.
    if (!spans.empty() && span.start < spans.back().span.end) continue;
    spans.push_back({span, topic, weight});
  }
  return spans;
}

std::vector<TopicShare> FilterByTopic(const TopicModel &model, int topic,
                                      double min_share) {
  if (topic < 0 || topic >= model.num_topics()) {
    throw Error("topic " + std::to_string(topic) + " out of range");
  }
  std::vector<TopicShare> out;
  for (int d = 0; d < model.num_docs(); ++d) {
    const double share = model.theta(d, topic);
    if (share >= min_share) out.push_back({model.doc_ids[d], share});
  }
  std::sort(out.begin(), out.end(),
            [](const TopicShare &a, const TopicShare &b) {
              if (a.share != b.share) return a.share > b.share;
              return a.doc_id < b.doc_id;
            });
  return out;
}

std::map<std::string, GroupMean> TopicByMetadata(const TopicModel &model,
                                                 const Corpus &corpus,
                                                 std::string_view field) {
  std::map<std::string, GroupMean> groups;
  bool seen = false;
  const auto k = static_cast<std::size_t>(model.num_topics());
  for (int d = 0; d < model.num_docs(); ++d) {
    const Document *doc = corpus.Find(model.doc_ids[d]);
    if (doc == nullptr) {
      throw Error("model document '" + model.doc_ids[d] +
                  "' is missing from the corpus");
    }
    std::string key = kMissingGroup;
    if (auto it = doc->metadata.find(std::string(field));
        it != doc->metadata.end()) {
      key = it->second;
      seen = true;
    }
    auto &g = groups[key];
    if (g.mean_theta.empty()) g.mean_theta.assign(k, 0.0);
    for (std::size_t t = 0; t < k; ++t) g.mean_theta[t] += model.theta(d, t);
    ++g.size;
  }
  if (!seen) {
    throw Error("metadata field '" + std::string(field) +
                "' is present on no document");
  }
  for (auto &[key, g] : groups) {
    for (double &x : g.mean_theta) x /= g.size;
  }
  return groups;
}

TopicLabel LabelTopic(TopicModel *model, int topic, std::string label,
                      std::string author, std::string timestamp) {
  if (topic < 0 || topic >= model->num_topics()) {
    throw Error("topic " + std::to_string(topic) + " out of range");
  }
  if (label.empty()) throw Error("label must not be empty");
  TopicLabel l{topic, std::move(label), std::move(author),
               std::move(timestamp)};
  model->labels.active[topic] = l;
  model->labels.history.push_back(l);
  return l;
}

std::string ThetaCsv(const TopicModel &model) {
  csv::Row header{"doc_id"};
  for (int t = 0; t < model.num_topics(); ++t) {
    header.push_back("topic_" + std::to_string(t));
  }
  std::string out = csv::FormatRow(header);
  for (int d = 0; d < model.num_docs(); ++d) {
    csv::Row row{model.doc_ids[d]};
    for (double x : model.theta.row(d)) {
      row.push_back(csv::FormatSignificant(x, 9));
    }
    out += csv::FormatRow(row);
  }
  return out;
}

std::string PhiCsv(const TopicModel &model) {
  csv::Row header{"topic"};
  header.insert(header.end(), model.terms.begin(), model.terms.end());
  std::string out = csv::FormatRow(header);
  for (int t = 0; t < model.num_topics(); ++t) {
    csv::Row row{std::to_string(t)};
    for (double x : model.phi.row(t)) {
      row.push_back(csv::FormatSignificant(x, 9));
    }
    out += csv::FormatRow(row);
  }
  return out;
}

std::string AssignmentsCsv(const TopicModel &model) {
  std::string out = "doc_id,position,term_index,topic\n";
  for (int d = 0; d < model.num_docs(); ++d) {
    const std::string id = csv::Escape(model.doc_ids[d]);
    for (std::size_t i = 0; i < model.z[d].size(); ++i) {
      out += id + "," + std::to_string(model.positions[d][i]) + "," +
             std::to_string(model.words[d][i]) + "," +
             std::to_string(model.z[d][i]) + "\n";
    }
  }
  return out;
}

std::map<std::string, std::string> ModelFiles(const TopicModel &model) {
  nlohmann::json config = model.config.ToJson();
  config["format"] = 1;
  config["params"] = model.params.ToJson();
  config["num_docs"] = model.num_docs();
  config["vocab_size"] = model.vocab_size();
  config["log_likelihood_trace"] = model.log_likelihood_trace;
  std::string vocab = "term_index,term,df\n";
  for (int w = 0; w < model.vocab_size(); ++w) {
    vocab += csv::FormatRow({std::to_string(w), model.terms[w],
                             std::to_string(model.term_df[w])});
  }
  return {{"config.json", config.dump(2) + "\n"},
          {"theta.csv", ThetaCsv(model)},
          {"phi.csv", PhiCsv(model)},
          {"assignments.csv", AssignmentsCsv(model)},
          {"labels.json", model.labels.ToJson().dump(2) + "\n"},
          {"vocab.csv", vocab}};
}

void SaveModel(const TopicModel &model, const fs::path &dir) {
  for (const auto &[name, data] : ModelFiles(model)) {
    WriteFileAtomic(dir / name, data);
  }
}

namespace {

bool Close(double stored, double fresh) {
  return std::abs(stored - fresh) <= 1e-8 * std::max(1e-300, std::abs(fresh));
}

}  // namespace

TopicModel LoadModel(const fs::path &dir) {
  if (!fs::is_directory(dir)) throw NotFound("no model at " + dir.string());
  TopicModel m;
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(ReadFile(dir / "config.json"));
  } catch (const nlohmann::json::exception &e) {
    throw Error("config.json: " + std::string(e.what()));
  }
  nlohmann::json lda = {{"k", config.at("k")},
                        {"alpha", config.at("alpha")},
                        {"beta", config.at("beta")},
                        {"iterations", config.at("iterations")},
                        {"burn_in", config.at("burn_in")},
                        {"seed", config.at("seed")}};
  m.config = LdaConfig::FromJson(lda);
  m.params = AnalysisParams::FromJson(config.at("params"));
  m.log_likelihood_trace =
      config.at("log_likelihood_trace").get<std::vector<double>>();

  const auto vocab_rows = csv::Parse(ReadFile(dir / "vocab.csv"));
  for (std::size_t r = 1; r < vocab_rows.size(); ++r) {
    if (std::stoi(vocab_rows[r][0]) != static_cast<int>(r - 1)) {
      throw Error("vocab.csv: indices must be contiguous");
    }
    m.terms.push_back(vocab_rows[r][1]);
    m.term_df.push_back(std::stoi(vocab_rows[r][2]));
  }

  const auto theta_rows = csv::Parse(ReadFile(dir / "theta.csv"));
  std::map<std::string, std::size_t> doc_index;
  for (std::size_t r = 1; r < theta_rows.size(); ++r) {
    doc_index[theta_rows[r][0]] = m.doc_ids.size();
    m.doc_ids.push_back(theta_rows[r][0]);
  }
  const std::size_t d = m.doc_ids.size();
  m.positions.resize(d);
  m.words.resize(d);
  m.z.resize(d);
  const auto assign_rows = csv::Parse(ReadFile(dir / "assignments.csv"));
  for (std::size_t r = 1; r < assign_rows.size(); ++r) {
    const auto &row = assign_rows[r];
    auto it = doc_index.find(row[0]);
    if (it == doc_index.end()) {
      throw Error("assignments.csv: unknown document '" + row[0] + "'");
    }
    const int w = std::stoi(row[2]);
    const int t = std::stoi(row[3]);
    if (w < 0 || w >= m.vocab_size() || t < 0 || t >= m.config.k) {
      throw Error("assignments.csv: row " + std::to_string(r) +
                  " out of range");
    }
    m.positions[it->second].push_back(std::stoi(row[1]));
    m.words[it->second].push_back(w);
    m.z[it->second].push_back(t);
  }
  RecomputeFromAssignments(&m);

  for (std::size_t r = 1; r < theta_rows.size(); ++r) {
    for (int t = 0; t < m.config.k; ++t) {
      if (!Close(std::stod(theta_rows[r][t + 1]), m.theta(r - 1, t))) {
        throw Error("theta.csv disagrees with assignments.csv");
      }
    }
  }
  const auto phi_rows = csv::Parse(ReadFile(dir / "phi.csv"));
  if (phi_rows.size() != static_cast<std::size_t>(m.config.k) + 1) {
    throw Error("phi.csv: expected one row per topic");
  }
  for (int t = 0; t < m.config.k; ++t) {
    for (int w = 0; w < m.vocab_size(); ++w) {
      if (!Close(std::stod(phi_rows[t + 1][w + 1]), m.phi(t, w))) {
        throw Error("phi.csv disagrees with assignments.csv");
      }
    }
  }
  if (fs::exists(dir / "labels.json")) {
    m.labels =
        TopicLabels::FromJson(nlohmann::json::parse(ReadFile(dir / "labels.json")));
  }
  return m;
}

}  // namespace cmwb
