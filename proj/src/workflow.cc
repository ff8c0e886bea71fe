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

#include "cmwb/workflow.h"

#include <algorithm>
#include <utility>

#include "cmwb/error.h"
#include "cmwb/interchange.h"

namespace cmwb::workflow {
namespace {

using nlohmann::json;

// Strict reader over one JSON object: unknown keys and wrong types are
// collected as field errors instead of thrown one at a time.
class Fields {
 public:
  Fields(const json &j, std::string prefix, std::set<std::string> allowed)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) {
      std::string path = prefix_;
      if (!path.empty() && path.back() == '.') path.pop_back();
      throw ValidationError(path.empty() ? "request" : path,
                            "must be an object");
    }
    for (const auto &[key, value] : j_.items()) {
      if (!allowed.contains(key)) Add(key, "unknown field");
    }
  }

  const json *Find(const std::string &key) const {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool Int(const std::string &key, int *out) {
    const json *v = Find(key);
    if (!v) return false;
    if (!v->is_number_integer()) return Add(key, "must be an integer");
    *out = v->get<int>();
    return true;
  }

  bool Seed(const std::string &key, std::uint64_t *out) {
    const json *v = Find(key);
    if (!v) return false;
    if (v->is_number_unsigned() ||
        (v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      *out = v->get<std::uint64_t>();
      return true;
    }
    return Add(key, "must be a non-negative integer");
  }

  bool Real(const std::string &key, double *out) {
    const json *v = Find(key);
    if (!v) return false;
    if (!v->is_number()) return Add(key, "must be a number");
    *out = v->get<double>();
    return true;
  }

  bool String(const std::string &key, std::string *out) {
    const json *v = Find(key);
    if (!v) return false;
    if (!v->is_string()) return Add(key, "must be a string");
    *out = v->get<std::string>();
    return true;
  }

  // Always false, so callers can `return Add(...)`.
  bool Add(const std::string &key, const std::string &message) {
    errors_.push_back({prefix_ + key, message});
    return false;
  }

  void Merge(const ValidationError &e) {
    errors_.insert(errors_.end(), e.fields().begin(), e.fields().end());
  }

  const std::string &prefix() const { return prefix_; }

  void Finish() {
    if (!errors_.empty()) throw ValidationError(std::move(errors_));
  }

 private:
  const json &j_;
  std::string prefix_;
  std::vector<FieldError> errors_;
};

const std::set<std::string> kPreprocessingKeys = {"analysis",
                                                  "entity_blacklist"};

std::set<std::string> With(std::set<std::string> keys,
                           std::initializer_list<const char *> more) {
  for (const char *k : more) keys.insert(k);
  return keys;
}

Preprocessing ReadPreprocessing(Fields *f) {
  Preprocessing p;
  if (const json *a = f->Find("analysis")) {
    try {
      p.analysis = AnalysisParams::FromJson(*a, f->prefix() + "analysis.");
    } catch (const ValidationError &e) {
      f->Merge(e);
    }
  }
  if (const json *b = f->Find("entity_blacklist")) {
    if (!b->is_array()) {
      f->Add("entity_blacklist", "must be an array of entity kinds");
    } else {
      for (std::size_t i = 0; i < b->size(); ++i) {
        const std::string key = "entity_blacklist[" + std::to_string(i) + "]";
        const json &x = (*b)[i];
        try {
          if (!x.is_string()) throw Error("");
          p.entity_blacklist.insert(ParseEntityKind(x.get<std::string>()));
        } catch (const Error &) {
          f->Add(key, "must be one of LOCATION, PERSON, ORGANIZATION, OTHER");
        }
      }
    }
  }
  return p;
}

std::optional<Codebook> ReadCodebook(Fields *f) {
  const json *c = f->Find("codebook");
  if (!c) return std::nullopt;
  try {
    return Codebook::FromJson(*c);
  } catch (const ValidationError &e) {
    for (const auto &fe : e.fields()) f->Add(fe.path, fe.message);
  } catch (const Error &e) {
    f->Add("codebook", e.what());
  }
  return std::nullopt;
}

LabelSource ReadLabels(Fields *f) {
  LabelSource src;
  const json *labels = f->Find("labels");
  const bool has_field = f->String("label_field", &src.field);
  if (labels && has_field) {
    f->Add("labels", "give either labels or label_field, not both");
    f->Add("label_field", "give either labels or label_field, not both");
  } else if (!labels && !has_field && !f->Find("label_field")) {
    f->Add("labels", "required unless label_field is given");
  } else if (labels) {
    if (!labels->is_object()) {
      f->Add("labels", "must map document ids to code ids");
    } else {
      for (const auto &[doc, code] : labels->items()) {
        if (!code.is_string()) {
          f->Add("labels." + doc, "must be a code id string");
        } else {
          src.labels[doc] = code.get<std::string>();
        }
      }
    }
  } else if (src.field.empty()) {
    f->Add("label_field", "must not be empty");
  }
  return src;
}

void CheckCodebook(Fields *f, const std::optional<Codebook> &codebook,
                   const LabelSource &labels) {
  if (!codebook) return;
  for (const auto &[doc, code] : labels.labels) {
    if (codebook->IndexOf(code) < 0) {
      f->Add("labels." + doc, "unknown code '" + code + "'");
    }
  }
}

json LabelSourceJson(const LabelSource &s) {
  if (!s.field.empty()) return {{"label_field", s.field}};
  return {{"labels", s.labels}};
}

std::vector<Document> Subset(const Corpus &corpus, const LabelMap &labels) {
  std::vector<Document> docs;
  for (const auto &d : corpus.documents) {
    if (labels.contains(d.id)) docs.push_back(d);
  }
  return docs;
}

}  // namespace

std::string_view JobKindName(JobKind kind) {
  switch (kind) {
    case JobKind::kImport: return "import";
    case JobKind::kDedup: return "dedup";
    case JobKind::kCooc: return "cooc";
    case JobKind::kLda: return "lda";
    case JobKind::kEval: return "eval";
    case JobKind::kSimulate: return "simulate";
    case JobKind::kExport: return "export";
  }
  return "";
}

std::optional<JobKind> ParseJobKind(std::string_view name) {
  for (JobKind k : {JobKind::kImport, JobKind::kDedup, JobKind::kCooc,
                    JobKind::kLda, JobKind::kEval, JobKind::kSimulate,
                    JobKind::kExport}) {
    if (JobKindName(k) == name) return k;
  }
  return std::nullopt;
}

bool IsWriter(JobKind kind) {
  return kind == JobKind::kImport || kind == JobKind::kDedup;
}

AnalysisParams Preprocessing::Resolve(const Corpus &corpus) const {
  AnalysisParams p = analysis;
  if (!entity_blacklist.empty()) {
    p.blacklist.merge(BlacklistFromEntities(corpus.documents,
                                            entity_blacklist));
  }
  return p;
}

json Preprocessing::ToJson() const {
  json kinds = json::array();
  for (EntityKind k : entity_blacklist) kinds.push_back(EntityKindName(k));
  return {{"analysis", analysis.ToJson()}, {"entity_blacklist", kinds}};
}

CoocRequest CoocRequest::FromJson(const json &j, const std::string &prefix) {
  Fields f(j, prefix,
           With(kPreprocessingKeys, {"unit", "measure", "min_count", "top_n"}));
  CoocRequest r;
  r.preprocessing = ReadPreprocessing(&f);
  std::string s;
  if (f.String("unit", &s)) {
    try {
      r.options.unit = ParseContextUnit(s);
    } catch (const Error &) {
      f.Add("unit", "must be sentence or document");
    }
  }
  if (f.String("measure", &s)) {
    try {
      r.options.measure = ParseMeasure(s);
    } catch (const Error &) {
      f.Add("measure", "must be dice, pmi or loglik");
    }
  }
  if (f.Int("min_count", &r.options.min_pair_count) &&
      r.options.min_pair_count < 1) {
    f.Add("min_count", "must be at least 1");
  }
  if (f.Int("top_n", &r.options.top_n) && r.options.top_n < 0) {
    f.Add("top_n", "must not be negative");
  }
  f.Finish();
  return r;
}

Preprocessing Preprocessing::FromJson(const json &j,
                                      const std::string &prefix) {
  Fields f(j, prefix, kPreprocessingKeys);
  Preprocessing p = ReadPreprocessing(&f);
  f.Finish();
  return p;
}

SessionRequest SessionRequest::FromJson(const json &j,
                                        const std::string &prefix) {
  Fields f(j, prefix,
           With(kPreprocessingKeys,
                {"codebook", "strategy", "seed", "candidates"}));
  SessionRequest r;
  r.preprocessing = ReadPreprocessing(&f);
  if (auto cb = ReadCodebook(&f)) {
    r.codebook = std::move(*cb);
    if (r.codebook.codes.size() < 2) {
      f.Add("codebook", "needs at least two codes");
    }
  } else if (!f.Find("codebook")) {
    f.Add("codebook", "required");
  }
  std::string s;
  if (f.String("strategy", &s)) {
    try {
      r.strategy = ParseStrategy(s);
    } catch (const Error &) {
      f.Add("strategy",
            "must be entropy, margin, least_confidence or random");
    }
  }
  f.Seed("seed", &r.seed);
  if (const json *c = f.Find("candidates")) {
    if (!c->is_array() ||
        !std::all_of(c->begin(), c->end(),
                     [](const json &x) { return x.is_string(); })) {
      f.Add("candidates", "must be an array of document ids");
    } else {
      r.candidates = c->get<std::vector<std::string>>();
      if (r.candidates->empty()) f.Add("candidates", "must not be empty");
    }
  }
  f.Finish();
  return r;
}

json CoocRequest::ToJson() const {
  json j = preprocessing.ToJson();
  j["unit"] = ContextUnitName(options.unit);
  j["measure"] = MeasureName(options.measure);
  j["min_count"] = options.min_pair_count;
  j["top_n"] = options.top_n;
  return j;
}

LdaRequest LdaRequest::FromJson(const json &j, const std::string &prefix) {
  static const std::set<std::string> kLdaKeys = {"k",          "alpha",
                                                 "beta",       "iterations",
                                                 "burn_in",    "seed"};
  std::set<std::string> allowed = kPreprocessingKeys;
  allowed.insert(kLdaKeys.begin(), kLdaKeys.end());
  Fields f(j, prefix, allowed);
  LdaRequest r;
  r.preprocessing = ReadPreprocessing(&f);
  json lda = json::object();
  for (const auto &key : kLdaKeys) {
    if (const json *v = f.Find(key)) lda[key] = *v;
  }
  try {
    r.config = LdaConfig::FromJson(lda, prefix);
  } catch (const ValidationError &e) {
    f.Merge(e);
  }
  f.Finish();
  return r;
}

json LdaRequest::ToJson() const {
  json j = preprocessing.ToJson();
  j.update(config.ToJson());
  return j;
}

LabelMap LabelSource::Resolve(const Corpus &corpus) const {
  if (!field.empty()) {
    LabelMap out;
    for (const auto &d : corpus.documents) {
      auto it = d.metadata.find(field);
      if (it != d.metadata.end()) out[d.id] = it->second;
    }
    if (out.empty()) {
      throw Error("no document carries metadata field '" + field + "'");
    }
    return out;
  }
  for (const auto &[doc, code] : labels) {
    if (!corpus.Find(doc)) {
      throw NotFound("labeled document '" + doc + "' is not in the corpus");
    }
  }
  return labels;
}

EvalRequest EvalRequest::FromJson(const json &j, const std::string &prefix) {
  Fields f(j, prefix,
           With(kPreprocessingKeys,
                {"codebook", "labels", "label_field", "folds", "seed"}));
  EvalRequest r;
  r.preprocessing = ReadPreprocessing(&f);
  r.codebook = ReadCodebook(&f);
  r.labels = ReadLabels(&f);
  CheckCodebook(&f, r.codebook, r.labels);
  if (f.Int("folds", &r.folds) && r.folds < 2) {
    f.Add("folds", "must be at least 2");
  }
  f.Seed("seed", &r.seed);
  f.Finish();
  return r;
}

json EvalRequest::ToJson() const {
  json j = preprocessing.ToJson();
  if (codebook) j["codebook"] = codebook->ToJson();
  j.update(LabelSourceJson(labels));
  j["folds"] = folds;
  j["seed"] = seed;
  return j;
}

SimulateRequest SimulateRequest::FromJson(const json &j,
                                          const std::string &prefix) {
  Fields f(j, prefix,
           With(kPreprocessingKeys,
                {"codebook", "labels", "label_field", "strategy", "budget",
                 "seed", "holdout_fraction"}));
  SimulateRequest r;
  r.preprocessing = ReadPreprocessing(&f);
  r.codebook = ReadCodebook(&f);
  r.gold = ReadLabels(&f);
  CheckCodebook(&f, r.codebook, r.gold);
  std::string s;
  if (f.String("strategy", &s)) {
    try {
      r.options.strategy = ParseStrategy(s);
    } catch (const Error &) {
      f.Add("strategy",
            "must be entropy, margin, least_confidence or random");
    }
  }
  if (f.Int("budget", &r.options.budget) && r.options.budget < 0) {
    f.Add("budget", "must not be negative");
  }
  f.Seed("seed", &r.options.seed);
  if (f.Real("holdout_fraction", &r.options.holdout_fraction) &&
      !(r.options.holdout_fraction > 0.0 &&
        r.options.holdout_fraction < 1.0)) {
    f.Add("holdout_fraction", "must lie in (0, 1)");
  }
  f.Finish();
  return r;
}

json SimulateRequest::ToJson() const {
  json j = preprocessing.ToJson();
  if (codebook) j["codebook"] = codebook->ToJson();
  j.update(LabelSourceJson(gold));
  j["strategy"] = StrategyName(options.strategy);
  j["budget"] = options.budget;
  j["seed"] = options.seed;
  j["holdout_fraction"] = options.holdout_fraction;
  return j;
}

DedupRequest DedupRequest::FromJson(const json &j, const std::string &prefix) {
  Fields f(j, prefix, {"threshold"});
  DedupRequest r;
  if (f.Real("threshold", &r.threshold) &&
      !(r.threshold > 0.0 && r.threshold <= 1.0)) {
    f.Add("threshold", "must lie in (0, 1]");
  }
  f.Finish();
  return r;
}

json DedupRequest::ToJson() const { return {{"threshold", threshold}}; }

ImportRequest ImportRequest::FromJson(const json &j,
                                      const std::string &prefix) {
  Fields f(j, prefix,
           {"format", "data", "mapping", "date_format", "delimiter",
            "gazetteer"});
  ImportRequest r;
  if (f.String("format", &r.format) && r.format != "csv" &&
      r.format != "corpus_csv") {
    f.Add("format", "must be csv or corpus_csv");
  }
  if (!f.String("data", &r.data) && !f.Find("data")) {
    f.Add("data", "required");
  }
  if (const json *m = f.Find("mapping")) {
    if (!m->is_object()) {
      f.Add("mapping", "must map column names to targets");
    } else {
      for (const auto &[column, target] : m->items()) {
        try {
          if (!target.is_string()) throw Error("");
          r.mapping.columns[column] =
              ColumnTarget::Parse(target.get<std::string>());
        } catch (const Error &) {
          f.Add("mapping." + column,
                "must be id, title, body, date or metadata:<field>");
        }
      }
    }
  } else if (r.format == "csv") {
    f.Add("mapping", "required for csv imports");
  }
  f.String("date_format", &r.mapping.date_format);
  std::string delimiter;
  if (f.String("delimiter", &delimiter)) {
    if (delimiter == "\\t") delimiter = "\t";
    if (delimiter.size() != 1) {
      f.Add("delimiter", "must be a single character");
    } else {
      r.mapping.delimiter = delimiter[0];
    }
  }
  f.String("gazetteer", &r.gazetteer);
  if (!r.gazetteer.empty()) {
    try {
      ParseGazetteer(r.gazetteer);
    } catch (const Error &e) {
      f.Add("gazetteer", e.what());
    }
  }
  f.Finish();
  return r;
}

json ImportRequest::ToJson() const {
  json mapping = json::object();
  for (const auto &[column, target] : this->mapping.columns) {
    mapping[column] = target.ToString();
  }
  return {{"format", format},
          {"mapping", mapping},
          {"date_format", this->mapping.date_format},
          {"delimiter", std::string(1, this->mapping.delimiter)},
          {"data_bytes", data.size()},
          {"gazetteer_entries",
           gazetteer.empty() ? 0 : ParseGazetteer(gazetteer).size()}};
}

Codebook CodebookFromLabels(const LabelMap &labels) {
  std::set<std::string> ids;
  for (const auto &[doc, code] : labels) ids.insert(code);
  Codebook cb;
  for (const auto &id : ids) cb.codes.push_back({id, id, ""});
  return cb;
}

Output RunCooc(const Corpus &corpus, const CoocRequest &request) {
  const AnalysisParams params = request.preprocessing.Resolve(corpus);
  const Vocabulary vocab = BuildVocabulary(corpus.documents, params);
  const CooccurrenceResult result =
      Cooccurrences(corpus.documents, vocab, request.options);
  Output out;
  out.files["pairs.csv"] = CooccurrenceCsv(result);
  out.summary = {{"pairs", result.pairs.size()},
                 {"vocab_size", vocab.size()},
                 {"measure", MeasureName(result.measure)},
                 {"unit", ContextUnitName(result.unit)}};
  return out;
}

TopicModel FitLdaRequest(const Corpus &corpus, const LdaRequest &request,
                         const ProgressSink &progress,
                         const CancelCheck &cancelled) {
  const AnalysisParams params = request.preprocessing.Resolve(corpus);
  const Vocabulary vocab = BuildVocabulary(corpus.documents, params);
  const DocTermMatrix dtm = BuildDtm(corpus.documents, vocab);
  const int iterations = request.config.iterations;
  SweepObserver observer = [&](int sweep, double) {
    if (progress) progress(static_cast<double>(sweep) / iterations);
    return !(cancelled && cancelled());
  };
  return FitLda(dtm, vocab, request.config, observer);
}

Output RunLda(const Corpus &corpus, const LdaRequest &request,
              const ProgressSink &progress, const CancelCheck &cancelled) {
  const TopicModel model =
      FitLdaRequest(corpus, request, progress, cancelled);
  Output out;
  out.files = ModelFiles(model);
  out.summary = {{"k", model.num_topics()},
                 {"num_docs", model.num_docs()},
                 {"vocab_size", model.vocab_size()},
                 {"seed", model.config.seed},
                 {"log_likelihood", model.log_likelihood_trace.back()}};
  return out;
}

Output RunEval(const Corpus &corpus, const EvalRequest &request) {
  const LabelMap labels = request.labels.Resolve(corpus);
  const Codebook codebook =
      request.codebook ? *request.codebook : CodebookFromLabels(labels);
  const std::vector<Document> docs = Subset(corpus, labels);
  Corpus sub{docs, corpus.schema};
  const AnalysisParams params = request.preprocessing.Resolve(sub);
  const Vocabulary vocab = BuildVocabulary(docs, params);
  const DocTermMatrix dtm = BuildDtm(docs, vocab);
  const EvalReport report =
      Evaluate(dtm, labels, codebook, request.folds, request.seed);
  Output out;
  out.files["report.json"] = report.ToJson().dump(2) + "\n";
  out.files["report.csv"] = report.ToCsv();
  out.summary = {{"macro_f1", report.macro_f1},
                 {"micro_f1", report.micro_f1},
                 {"folds", report.folds},
                 {"seed", report.seed}};
  return out;
}

Output RunSimulate(const Corpus &corpus, const SimulateRequest &request) {
  const LabelMap gold = request.gold.Resolve(corpus);
  const Codebook codebook =
      request.codebook ? *request.codebook : CodebookFromLabels(gold);
  const std::vector<Document> docs = Subset(corpus, gold);
  Corpus sub{docs, corpus.schema};
  const AnalysisParams params = request.preprocessing.Resolve(sub);
  const Vocabulary vocab = BuildVocabulary(docs, params);
  const DocTermMatrix dtm = BuildDtm(docs, vocab);
  const auto curve =
      SimulateActiveLearning(dtm, gold, codebook, request.options);
  Output out;
  out.files["curve.csv"] = CurveCsv(curve);
  const auto to90 = LabelsToAccuracy(curve, 0.9);
  out.summary = {{"points", curve.size()},
                 {"strategy", StrategyName(request.options.strategy)},
                 {"seed", request.options.seed},
                 {"final_accuracy", curve.back().accuracy},
                 {"labels_to_90", to90 ? json(*to90) : json(nullptr)}};
  return out;
}

json GroupsJson(const std::vector<DuplicateGroup> &groups) {
  json out = json::array();
  for (const auto &g : groups) {
    out.push_back({{"representative", g.representative},
                   {"members", g.members},
                   {"similarity", g.similarity},
                   {"link_similarity", g.link_similarity}});
  }
  return out;
}

CorpusOutput RunDedup(const Corpus &corpus, const DedupRequest &request) {
  const auto groups = Deduplicate(corpus.documents, request.threshold);
  std::set<std::string> drop;
  for (const auto &g : groups) {
    for (const auto &m : g.members) {
      if (m != g.representative) drop.insert(m);
    }
  }
  CorpusOutput out;
  for (const auto &d : corpus.documents) {
    if (!drop.contains(d.id)) out.corpus.documents.push_back(d);
  }
  out.corpus.RefreshSchema();
  out.output.files["groups.json"] = GroupsJson(groups).dump(2) + "\n";
  out.output.summary = {{"groups", groups.size()},
                        {"removed", drop.size()},
                        {"documents", out.corpus.documents.size()}};
  return out;
}

ImportResult ParseImport(const ImportRequest &request) {
  if (request.format == "corpus_csv") {
    Corpus c = ParseCorpusCsv(request.data);
    ImportResult r;
    r.report.rows_total = r.report.accepted = c.documents.size();
    r.documents = std::move(c.documents);
    return r;
  }
  return ImportCsvText(request.data, request.mapping);
}

CorpusOutput FinishImport(const Corpus &base, ImportResult imported,
                          const std::string &gazetteer) {
  CorpusOutput out;
  out.corpus = base;
  const Gazetteer gaz = gazetteer.empty() ? Gazetteer{}
                                          : ParseGazetteer(gazetteer);
  for (auto &d : imported.documents) {
    if (base.Find(d.id)) {
      throw Error("document id '" + d.id + "' already exists in the corpus");
    }
    if (!gaz.empty()) d = TagEntities(std::move(d), gaz);
    out.corpus.documents.push_back(std::move(d));
  }
  out.corpus.RefreshSchema();
  const json report = imported.report.ToJson();
  out.output.files["import_report.json"] = report.dump(2) + "\n";
  out.output.summary = report;
  out.output.summary["documents"] = out.corpus.documents.size();
  return out;
}

CorpusOutput RunImport(const Corpus &base, const ImportRequest &request) {
  return FinishImport(base, ParseImport(request), request.gazetteer);
}

json DocumentJson(const Document &doc) {
  json entities = json::array();
  for (const auto &e : doc.entity_tags) {
    entities.push_back({{"start", e.start},
                        {"end", e.end},
                        {"kind", EntityKindName(e.kind)},
                        {"surface", e.surface}});
  }
  return {{"id", doc.id},
          {"title", doc.title},
          {"date", doc.date ? json(doc.date->ToString()) : json(nullptr)},
          {"body", doc.body},
          {"metadata", doc.metadata},
          {"entities", entities}};
}

}  // namespace cmwb::workflow
