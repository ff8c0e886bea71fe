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

#include "cmwb/cli.h"

#include <deque>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmwb/classify.h"
#include "cmwb/cooccurrence.h"
#include "cmwb/csv.h"
#include "cmwb/error.h"
#include "cmwb/fileutil.h"
#include "cmwb/interchange.h"
#include "cmwb/service.h"
#include "cmwb/topics.h"
#include "cmwb/workflow.h"

namespace cmwb::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// A flag combination CLI11 cannot express, reported like a parse error.
class UsageError : public Error {
 public:
  using Error::Error;
};

fs::path Abs(const std::string &p) { return fs::absolute(fs::path(p)); }

json ReadJsonFile(const fs::path &path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw Error(path.string() + ": malformed JSON: " + e.what());
  }
}

Codebook ReadCodebook(const fs::path &path) {
  if (path.extension() == ".json") return Codebook::FromJson(ReadJsonFile(path));
  return Codebook::FromCsv(ReadFile(path));
}

std::string Fixed(double v, int decimals = 6) {
  return csv::FormatFixed(v, decimals);
}

// Preprocessing flags shared by every analysis command.
struct AnalysisFlags {
  std::string params_file;
  int ngram = 1;
  int min_char = 2;
  int max_char = 50;
  bool no_lowercase = false;
  bool keep_stopwords = false;
  std::string stopword_language = "en";
  bool keep_numbers = false;
  std::string blacklist_file;
  std::string whitelist_file;
  double prune_min_df = 0.0;
  double prune_max_df = 1.0;
  bool consolidate = false;
  std::vector<std::string> entity_blacklist;
  std::map<std::string, CLI::Option *> opts;

  void Add(CLI::App *app) {
    const char *g = "Preprocessing";
    opts["params"] = app->add_option("--params", params_file,
                                     "JSON file with analysis parameters")
                         ->check(CLI::ExistingFile)
                         ->group(g);
    opts["ngram"] = app->add_option("--ngram", ngram, "1 or 2")->group(g);
    opts["min_char"] =
        app->add_option("--min-char", min_char, "Shortest kept word")->group(g);
    opts["max_char"] =
        app->add_option("--max-char", max_char, "Longest kept word")->group(g);
    opts["no_lowercase"] =
        app->add_flag("--no-lowercase", no_lowercase, "Keep case")->group(g);
    opts["keep_stopwords"] =
        app->add_flag("--keep-stopwords", keep_stopwords, "Keep stopwords")
            ->group(g);
    opts["stopword_language"] =
        app->add_option("--stopword-language", stopword_language, "en or de")
            ->group(g);
    opts["keep_numbers"] =
        app->add_flag("--keep-numbers", keep_numbers, "Keep numeric terms")
            ->group(g);
    opts["blacklist"] = app->add_option("--blacklist", blacklist_file,
                                        "File of terms to drop")
                            ->check(CLI::ExistingFile)
                            ->group(g);
    opts["whitelist"] = app->add_option("--whitelist", whitelist_file,
                                        "File of the only terms to keep")
                            ->check(CLI::ExistingFile)
                            ->group(g);
    opts["prune_min_df"] =
        app->add_option("--prune-min-df", prune_min_df,
                        "Drop terms in fewer than this share of documents")
            ->group(g);
    opts["prune_max_df"] =
        app->add_option("--prune-max-df", prune_max_df,
                        "Drop terms in more than this share of documents")
            ->group(g);
    opts["consolidate_entities"] =
        app->add_flag("--consolidate-entities", consolidate,
                      "Merge multi-word entities into single tokens")
            ->group(g);
    opts["entity_blacklist"] =
        app->add_option("--entity-blacklist", entity_blacklist,
                        "Drop words of tagged entities of these kinds "
                        "(LOCATION, PERSON, ORGANIZATION, OTHER)")
            ->group(g);
  }

  bool Given(const char *key) const { return opts.at(key)->count() > 0; }

  // {analysis, entity_blacklist} in the workflow request shape.
  json Build(CommandPlan *plan) const {
    json analysis = json::object();
    if (Given("params")) {
      plan->inputs["params"] = Abs(params_file);
      analysis = ReadJsonFile(params_file);
    }
    if (Given("ngram")) analysis["ngram"] = ngram;
    if (Given("min_char")) analysis["min_char"] = min_char;
    if (Given("max_char")) analysis["max_char"] = max_char;
    if (no_lowercase) analysis["lowercase"] = false;
    if (keep_stopwords) analysis["remove_stopwords"] = false;
    if (Given("stopword_language")) {
      analysis["stopword_language"] = stopword_language;
    }
    if (keep_numbers) analysis["remove_numbers"] = false;
    if (Given("blacklist")) {
      plan->inputs["blacklist"] = Abs(blacklist_file);
      analysis["blacklist"] = LoadTermList(blacklist_file);
    }
    if (Given("whitelist")) {
      plan->inputs["whitelist"] = Abs(whitelist_file);
      analysis["whitelist"] = LoadTermList(whitelist_file);
    }
    if (Given("prune_min_df")) analysis["prune_min_df"] = prune_min_df;
    if (Given("prune_max_df")) analysis["prune_max_df"] = prune_max_df;
    if (consolidate) analysis["consolidate_entities"] = true;
    json j = {{"analysis", analysis}};
    if (!entity_blacklist.empty()) j["entity_blacklist"] = entity_blacklist;
    return j;
  }
};

// Topic chosen by index, by active label or as the topic where a term
// weighs most.
struct TopicSelector {
  int topic = -1;
  std::string label;
  std::string term;
  CLI::Option *topic_opt = nullptr;

  void Add(CLI::App *app, bool required) {
    auto *group = app->add_option_group("topic", "Topic selection");
    topic_opt = group->add_option("--topic", topic, "Topic index");
    group->add_option("--topic-label", label, "Topic with this active label");
    group->add_option("--topic-of", term,
                      "Topic in which this term has the highest weight");
    group->require_option(required ? 1 : 0, 1);
  }

  bool Given() const {
    return topic_opt->count() > 0 || !label.empty() || !term.empty();
  }

  int Resolve(const TopicModel &model) const {
    if (topic_opt->count() > 0) {
      if (topic < 0 || topic >= model.num_topics()) {
        throw UsageError("--topic must lie in [0, " +
                         std::to_string(model.num_topics() - 1) + "]");
      }
      return topic;
    }
    if (!label.empty()) {
      for (const auto &[k, l] : model.labels.active) {
        if (l.label == label) return k;
      }
      throw Error("no topic is labeled '" + label + "'");
    }
    auto it = std::find(model.terms.begin(), model.terms.end(), term);
    if (it == model.terms.end()) {
      throw Error("term '" + term + "' is not in the model vocabulary");
    }
    const auto w = static_cast<std::size_t>(it - model.terms.begin());
    int best = 0;
    for (int k = 1; k < model.num_topics(); ++k) {
      if (model.phi(k, w) > model.phi(best, w)) best = k;
    }
    return best;
  }

  json ToJson() const {
    if (topic_opt->count() > 0) return topic;
    if (!label.empty()) return {{"label", label}};
    if (!term.empty()) return {{"term", term}};
    return nullptr;
  }
};

// Training or gold labels from a CSV file or a metadata field.
struct LabelFlags {
  std::string labels_file;
  std::string label_field;
  std::string codebook_file;

  void Add(CLI::App *app, bool codebook_required) {
    auto *group = app->add_option_group("labels", "Label source");
    group->add_option("--labels", labels_file, "CSV with doc_id,code_id")
        ->check(CLI::ExistingFile);
    group->add_option("--label-field", label_field,
                      "Metadata field holding each document's code");
    group->require_option(1);
    auto *cb = app->add_option("--codebook", codebook_file,
                               "Codebook as CSV (id,name[,description]) "
                               "or JSON; defaults to the distinct labels")
                   ->check(CLI::ExistingFile);
    if (codebook_required) cb->required();
  }

  // Adds codebook and labels | label_field to a request.
  void Fill(json *request, CommandPlan *plan) const {
    if (!codebook_file.empty()) {
      plan->inputs["codebook"] = Abs(codebook_file);
      (*request)["codebook"] = ReadCodebook(codebook_file).ToJson();
    }
    if (!labels_file.empty()) {
      plan->inputs["labels"] = Abs(labels_file);
      (*request)["labels"] = ParseLabelsCsv(ReadFile(labels_file));
    } else {
      (*request)["label_field"] = label_field;
    }
  }
};

struct Command {
  CLI::App *app = nullptr;
  std::string name;
  std::function<int()> run;
};

class Cli {
 public:
  Cli(std::ostream &out, std::ostream &err) : out_(out), err_(err) {
    app_.name("cmwb");
    app_.description(
        "Content-analysis workbench: corpus import, preprocessing, "
        "frequencies, co-occurrences, topic models, classification and "
        "exchange formats.");
    app_.require_subcommand(1);
    app_.set_config("--config", "cm.toml",
                    "TOML file presetting flags; flags given on the command "
                    "line win");
    app_.add_flag("--dry-run", dry_run_,
                  "Print the resolved command plan as JSON and exit");
    app_.fallthrough();
    AddImport();
    AddDedup();
    AddFreq();
    AddCooc();
    AddLda();
    AddTopics();
    AddClassify();
    AddExport();
    AddServe();
  }

  int Run(const std::vector<std::string> &args) {
    std::vector<std::string> store = {"cmwb"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : store) argv.push_back(s.data());
    try {
      app_.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &e) {
      out_ << Deepest()->help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
      out_ << app_.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError &e) {
      err_ << "error: " << e.what() << "\n\n" << Deepest()->help();
      return kExitUsage;
    }
    for (auto &c : commands_) {
      if (!c.app->parsed()) continue;
      try {
        return c.run();
      } catch (const UsageError &e) {
        err_ << "error: " << e.what() << "\n\n" << c.app->help();
        return kExitUsage;
      } catch (const ValidationError &e) {
        err_ << "error: invalid parameters\n";
        for (const auto &f : e.fields()) {
          err_ << "  " << f.path << ": " << f.message << "\n";
        }
        return kExitUsage;
      } catch (const std::exception &e) {
        err_ << "error: " << e.what() << "\n";
        return kExitFailure;
      }
    }
    err_ << app_.help();
    return kExitUsage;
  }

 private:
  CLI::App *Deepest() {
    CLI::App *app = &app_;
    for (;;) {
      CLI::App *next = nullptr;
      for (CLI::App *sub : app->get_subcommands()) {
        if (sub->parsed()) next = sub;
      }
      if (!next) return app;
      app = next;
    }
  }

  template <typename T>
  std::shared_ptr<T> Vars() {
    return std::make_shared<T>();
  }

  CLI::App *Sub(CLI::App *parent, const std::string &name,
                const std::string &desc, std::function<int()> run) {
    CLI::App *app = parent->add_subcommand(name, desc);
    std::string full = parent == &app_ ? name : parent->get_name() + " " + name;
    if (run) commands_.push_back({app, full, std::move(run)});
    return app;
  }

  // Prints the plan instead of running when --dry-run is set.
  bool DryRun(const CommandPlan &plan) {
    if (plan.seed) err_ << "seed: " << *plan.seed << "\n";
    if (!dry_run_) return false;
    out_ << plan.ToJson().dump(2) << "\n";
    return true;
  }

  static void AddCorpus(CLI::App *app, std::string *dir) {
    app->add_option("--corpus", *dir, "Corpus directory written by import")
        ->required()
        ->check(CLI::ExistingDirectory);
  }

  static void AddModel(CLI::App *app, std::string *dir) {
    app->add_option("--model", *dir, "Model directory written by lda")
        ->required()
        ->check(CLI::ExistingDirectory);
  }

  // -------------------------------------------------------------------------
  void AddImport() {
    struct V {
      std::string input, format, date_format = "%Y-%m-%d", delimiter,
                                 gazetteer, out;
      std::vector<std::string> maps;
      bool json = false;
    };
    auto v = Vars<V>();
    auto *app = Sub(&app_, "import", "Import documents into a corpus directory",
                    [this, v] { return Import(*v); });
    app->add_option("--input", v->input, "CSV/TSV file, text file or folder")
        ->required()
        ->check(CLI::ExistingPath);
    app->add_option("--format", v->format,
                    "csv, tsv, corpus-csv or text (default: by extension)")
        ->check(CLI::IsMember({"csv", "tsv", "corpus-csv", "text"}));
    app->add_option("--map", v->maps,
                    "COLUMN=TARGET with TARGET id, title, body, date or "
                    "metadata:<field>; default maps id, title, date, "
                    "body/text and turns other columns into metadata");
    app->add_option("--date-format", v->date_format, "Pattern with %Y %m %d");
    app->add_option("--delimiter", v->delimiter, "Field delimiter");
    app->add_option("--gazetteer", v->gazetteer,
                    "Tab-separated surface and entity kind per line")
        ->check(CLI::ExistingFile);
    app->add_option("--out", v->out, "Corpus directory to write")->required();
    app->add_flag("--json", v->json, "Print the import report as JSON");
  }

  template <typename V>
  int Import(const V &v) {
    CommandPlan plan;
    plan.subcommand = "import";
    plan.inputs["input"] = Abs(v.input);
    plan.outputs["corpus"] = Abs(v.out);
    std::string format = v.format;
    const fs::path input(v.input);
    if (format.empty()) {
      if (fs::is_directory(input) || input.extension() == ".txt") {
        format = "text";
      } else if (input.extension() == ".tsv") {
        format = "tsv";
      } else {
        format = "csv";
      }
    }
    std::string gazetteer;
    if (!v.gazetteer.empty()) {
      plan.inputs["gazetteer"] = Abs(v.gazetteer);
      gazetteer = ReadFile(v.gazetteer);
    }
    workflow::CorpusOutput result;
    if (format == "text") {
      if (!v.maps.empty()) throw UsageError("--map applies to CSV input only");
      plan.params = {{"format", "text"}};
      if (DryRun(plan)) return kExitOk;
      result = workflow::FinishImport(Corpus{}, ImportPlainText(input),
                                      gazetteer);
    } else {
      json request = {{"format", format == "corpus-csv" ? "corpus_csv" : "csv"},
                      {"date_format", v.date_format},
                      {"gazetteer", gazetteer}};
      std::string delimiter = v.delimiter;
      if (delimiter.empty()) delimiter = format == "tsv" ? "\t" : ",";
      request["delimiter"] = delimiter;
      const std::string data = ReadFile(input);
      if (format != "corpus-csv") {
        json mapping = json::object();
        if (v.maps.empty()) {
          const char delim = delimiter == "\\t" ? '\t' : delimiter[0];
          const auto rows = csv::Parse(data, delim);
          if (rows.empty()) throw Error(v.input + " is empty");
          for (const auto &column : rows.front()) {
            if (column == "id" || column == "title" || column == "date" ||
                column == "body") {
              mapping[column] = column;
            } else if (column == "text") {
              mapping[column] = "body";
            } else {
              mapping[column] = "metadata:" + column;
            }
          }
        } else {
          for (const auto &m : v.maps) {
            const auto eq = m.find('=');
            if (eq == std::string::npos || eq == 0) {
              throw UsageError("--map expects COLUMN=TARGET, got '" + m + "'");
            }
            mapping[m.substr(0, eq)] = m.substr(eq + 1);
          }
        }
        request["mapping"] = mapping;
      }
      request["data"] = data;
      const auto parsed = workflow::ImportRequest::FromJson(request);
      plan.params = parsed.ToJson();
      if (DryRun(plan)) return kExitOk;
      result = workflow::RunImport(Corpus{}, parsed);
    }
    SaveCorpus(result.corpus, v.out);
    for (const auto &[name, data] : result.output.files) {
      WriteFileAtomic(fs::path(v.out) / name, data);
    }
    if (v.json) {
      out_ << result.output.summary.dump(2) << "\n";
    } else {
      const json &s = result.output.summary;
      out_ << "rows: " << s["rows_total"] << ", accepted: " << s["accepted"]
           << ", rejected: " << s["rejected"].size() << "\n";
      for (const auto &r : s["rejected"]) {
        out_ << "  row " << r["row"] << ": "
             << r["reason"].get<std::string>() << "\n";
      }
      out_ << "wrote " << result.corpus.documents.size() << " documents to "
           << v.out << "\n";
    }
    return kExitOk;
  }

  // -------------------------------------------------------------------------
  void AddDedup() {
    struct V {
      std::string corpus, out;
      double threshold = 0.8;
      bool json = false;
    };
    auto v = Vars<V>();
    auto *app = Sub(&app_, "dedup",
                    "Drop near-duplicate documents (word 5-shingle Jaccard)",
                    [this, v] { return Dedup(*v); });
    AddCorpus(app, &v->corpus);
    app->add_option("--threshold", v->threshold, "Jaccard similarity cutoff");
    app->add_option("--out", v->out, "Deduplicated corpus directory")
        ->required();
    app->add_flag("--json", v->json, "Print the duplicate groups as JSON");
  }

  template <typename V>
  int Dedup(const V &v) {
    CommandPlan plan;
    plan.subcommand = "dedup";
    plan.inputs["corpus"] = Abs(v.corpus);
    plan.outputs["corpus"] = Abs(v.out);
    const auto request =
        workflow::DedupRequest::FromJson({{"threshold", v.threshold}});
    plan.params = request.ToJson();
    if (DryRun(plan)) return kExitOk;
    const auto result = workflow::RunDedup(LoadCorpus(v.corpus), request);
    SaveCorpus(result.corpus, v.out);
    for (const auto &[name, data] : result.output.files) {
      WriteFileAtomic(fs::path(v.out) / name, data);
    }
    if (v.json) {
      out_ << result.output.files.at("groups.json");
    } else {
      const json &s = result.output.summary;
      out_ << "groups: " << s["groups"] << ", removed: " << s["removed"]
           << ", kept: " << s["documents"] << "\n";
    }
    return kExitOk;
  }

  // -------------------------------------------------------------------------
  void AddFreq() {
    struct V {
      std::string corpus, term, granularity = "year";
      int top = 20;
      bool json = false;
      AnalysisFlags analysis;
    };
    auto v = Vars<V>();
    auto *app = Sub(&app_, "freq", "Term frequencies or a term's time series",
                    [this, v] { return Freq(*v); });
    AddCorpus(app, &v->corpus);
    app->add_option("--top", v->top, "Number of terms to list");
    app->add_option("--term", v->term, "Print this term's counts over time");
    app->add_option("--granularity", v->granularity, "year or month")
        ->check(CLI::IsMember({"year", "month"}));
    app->add_flag("--json", v->json, "Machine-readable output");
    v->analysis.Add(app);
  }

  template <typename V>
  int Freq(const V &v) {
    CommandPlan plan;
    plan.subcommand = "freq";
    plan.inputs["corpus"] = Abs(v.corpus);
    const auto pre =
        workflow::Preprocessing::FromJson(v.analysis.Build(&plan));
    plan.params = pre.ToJson();
    plan.params["top"] = v.top;
    if (!v.term.empty()) {
      plan.params["term"] = v.term;
      plan.params["granularity"] = v.granularity;
    }
    if (DryRun(plan)) return kExitOk;
    const Corpus corpus = LoadCorpus(v.corpus);
    const Vocabulary vocab =
        BuildVocabulary(corpus.documents, pre.Resolve(corpus));
    if (!v.term.empty()) {
      const auto series = TermTimeSeries(
          corpus.documents, vocab, v.term,
          v.granularity == "month" ? Granularity::kMonth : Granularity::kYear);
      if (v.json) {
        json points = json::array();
        for (const auto &p : series.points) {
          points.push_back({{"period", p.period},
                            {"count", p.count},
                            {"doc_count", p.doc_count}});
        }
        out_ << json{{"term", v.term},
                     {"points", points},
                     {"excluded", series.excluded}}
                    .dump(2)
             << "\n";
      } else {
        out_ << "period\tcount\tdoc_count\n";
        for (const auto &p : series.points) {
          out_ << p.period << "\t" << p.count << "\t" << p.doc_count << "\n";
        }
        if (series.excluded > 0) {
          err_ << series.excluded << " undated documents excluded\n";
        }
      }
      return kExitOk;
    }
    const DocTermMatrix dtm = BuildDtm(corpus.documents, vocab);
    const auto freqs = TermFrequencies(dtm, vocab, v.top);
    if (v.json) {
      json rows = json::array();
      for (const auto &f : freqs) {
        rows.push_back(
            {{"term", f.term}, {"count", f.count}, {"doc_freq", f.doc_freq}});
      }
      out_ << rows.dump(2) << "\n";
    } else {
      out_ << "term\tcount\tdoc_freq\n";
      for (const auto &f : freqs) {
        out_ << f.term << "\t" << f.count << "\t" << f.doc_freq << "\n";
      }
    }
    return kExitOk;
  }

  // -------------------------------------------------------------------------
  void AddCooc() {
    struct V {
      std::string corpus, out, unit = "sentence", measure = "dice";
      int min_count = 1;
      int top = 0;
      bool json = false;
      AnalysisFlags analysis;
    };
    auto v = Vars<V>();
    auto *app = Sub(&app_, "cooc", "Ranked term co-occurrences",
                    [this, v] { return Cooc(*v); });
    AddCorpus(app, &v->corpus);
    app->add_option("--unit", v->unit, "sentence or document")
        ->check(CLI::IsMember({"sentence", "document"}));
    app->add_option("--measure", v->measure, "dice, pmi or loglik")
        ->check(CLI::IsMember({"dice", "pmi", "loglik"}));
    app->add_option("--min-count", v->min_count,
                    "Minimum number of shared contexts");
    app->add_option("--top", v->top, "Keep the best N pairs (0 keeps all)");
    app->add_option("--out", v->out, "CSV file to write");
    app->add_flag("--json", v->json, "Print the pairs as JSON");
    v->analysis.Add(app);
  }

  template <typename V>
  int Cooc(const V &v) {
    CommandPlan plan;
    plan.subcommand = "cooc";
    plan.inputs["corpus"] = Abs(v.corpus);
    if (!v.out.empty()) plan.outputs["pairs"] = Abs(v.out);
    json request = v.analysis.Build(&plan);
    request["unit"] = v.unit;
    request["measure"] = v.measure;
    request["min_count"] = v.min_count;
    request["top_n"] = v.top;
    const auto parsed = workflow::CoocRequest::FromJson(request);
    plan.params = parsed.ToJson();
    if (DryRun(plan)) return kExitOk;
    const auto output = workflow::RunCooc(LoadCorpus(v.corpus), parsed);
    const std::string &pairs = output.files.at("pairs.csv");
    if (!v.out.empty()) {
      WriteFileAtomic(v.out, pairs);
      err_ << "wrote " << output.summary["pairs"] << " pairs to " << v.out
           << "\n";
    }
    if (v.json) {
      const auto rows = csv::Parse(pairs);
      json out = json::array();
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto &r = rows[i];
        out.push_back({{"term_a", r[0]},
                       {"term_b", r[1]},
                       {"n_a", std::stoll(r[2])},
                       {"n_b", std::stoll(r[3])},
                       {"n_ab", std::stoll(r[4])},
                       {"n", std::stoll(r[5])},
                       {"measure", r[6]},
                       {"score", std::stod(r[7])}});
      }
      out_ << out.dump(2) << "\n";
    } else if (v.out.empty()) {
      out_ << pairs;
    }
    return kExitOk;
  }

  // -------------------------------------------------------------------------
  void AddLda() {
    struct V {
      std::string corpus, out;
      int k = 10;
      double alpha = 0, beta = 0.01;
      int iterations = 1000, burn_in = 500;
      std::uint64_t seed = 1;
      CLI::Option *alpha_opt = nullptr, *beta_opt = nullptr,
                  *iter_opt = nullptr, *burn_opt = nullptr;
      bool json = false;
      AnalysisFlags analysis;
    };
    auto v = Vars<V>();
    auto *app = Sub(&app_, "lda", "Fit an LDA topic model (collapsed Gibbs)",
                    [this, v] { return Lda(*v); });
    AddCorpus(app, &v->corpus);
    app->add_option("--k", v->k, "Number of topics");
    v->alpha_opt =
        app->add_option("--alpha", v->alpha, "Document-topic prior (50/k)");
    v->beta_opt = app->add_option("--beta", v->beta, "Topic-word prior (0.01)");
    v->iter_opt = app->add_option("--iterations", v->iterations,
                                  "Gibbs sweeps (1000)");
    v->burn_opt =
        app->add_option("--burn-in", v->burn_in, "Burn-in sweeps (500)");
    app->add_option("--seed", v->seed, "Random seed (default 1)");
    app->add_option("--out", v->out, "Model directory to write")->required();
    app->add_flag("--json", v->json, "Print the fit summary as JSON");
    v->analysis.Add(app);
  }

  template <typename V>
  int Lda(const V &v) {
    CommandPlan plan;
    plan.subcommand = "lda";
    plan.inputs["corpus"] = Abs(v.corpus);
    plan.outputs["model"] = Abs(v.out);
    json request = v.analysis.Build(&plan);
    request["k"] = v.k;
    request["seed"] = v.seed;
    if (v.alpha_opt->count()) request["alpha"] = v.alpha;
    if (v.beta_opt->count()) request["beta"] = v.beta;
    if (v.iter_opt->count()) request["iterations"] = v.iterations;
    if (v.burn_opt->count()) request["burn_in"] = v.burn_in;
    const auto parsed = workflow::LdaRequest::FromJson(request);
    plan.params = parsed.ToJson();
    plan.seed = parsed.config.seed;
    if (DryRun(plan)) return kExitOk;
    int reported = -1;
    auto progress = [&](double f) {
      const int decile = static_cast<int>(f * 10.0);
      if (decile > reported) {
        reported = decile;
        err_ << "lda: sweep "
             << static_cast<int>(f * parsed.config.iterations + 0.5) << "/"
             << parsed.config.iterations << "\n";
      }
    };
    const auto output =
        workflow::RunLda(LoadCorpus(v.corpus), parsed, progress);
    for (const auto &[name, data] : output.files) {
      WriteFileAtomic(fs::path(v.out) / name, data);
    }
    if (v.json) {
      out_ << output.summary.dump(2) << "\n";
    } else {
      const json &s = output.summary;
      out_ << "fitted " << s["k"] << " topics over " << s["num_docs"]
           << " documents and " << s["vocab_size"] << " terms; final "
           << "log-likelihood " << Fixed(s["log_likelihood"].get<double>(), 3)
           << "\nwrote " << v.out << "\n";
    }
    return kExitOk;
  }

  // -------------------------------------------------------------------------
  void AddTopics() {
    auto *topics = Sub(&app_, "topics", "Inspect and label a fitted model",
                       nullptr);
    topics->require_subcommand(1);

    struct Show {
      std::string model;
      int n = 10;
      double lambda = 1.0;
      bool json = false;
    };
    auto show = Vars<Show>();
    auto *s = Sub(topics, "show", "Top words per topic", [this, show] {
      CommandPlan plan;
      plan.subcommand = "topics show";
      plan.inputs["model"] = Abs(show->model);
      plan.params = {{"n", show->n}, {"lambda", show->lambda}};
      if (DryRun(plan)) return kExitOk;
      if (show->n < 1) throw UsageError("--n must be positive");
      if (show->lambda < 0.0 || show->lambda > 1.0) {
        throw UsageError("--lambda must lie in [0, 1]");
      }
      const TopicModel model = LoadModel(show->model);
      json topics_json = json::array();
      for (int k = 0; k < model.num_topics(); ++k) {
        json words = json::array();
        for (const auto &w : TopWords(model, k, show->n, show->lambda)) {
          words.push_back({{"term", w.term}, {"relevance", w.relevance}});
        }
        auto l = model.labels.active.find(k);
        topics_json.push_back(
            {{"topic", k},
             {"label", l == model.labels.active.end() ? json(nullptr)
                                                      : json(l->second.label)},
             {"top_words", words}});
      }
      if (show->json) {
        out_ << topics_json.dump(2) << "\n";
        return kExitOk;
      }
      for (const auto &t : topics_json) {
        out_ << "topic " << t["topic"];
        if (!t["label"].is_null()) {
          out_ << " [" << t["label"].get<std::string>() << "]";
        }
        out_ << ":";
        for (const auto &w : t["top_words"]) {
          out_ << " " << w["term"].get<std::string>();
        }
        out_ << "\n";
      }
      return kExitOk;
    });
    AddModel(s, &show->model);
    s->add_option("--n", show->n, "Words per topic");
    s->add_option("--lambda", show->lambda,
                  "Relevance weight: 1 ranks by probability, lower values "
                  "favour topic-specific words");
    s->add_flag("--json", show->json, "Machine-readable output");

    struct Label {
      std::string model, label, author;
      TopicSelector topic;
      bool json = false;
    };
    auto lab = Vars<Label>();
    auto *l = Sub(topics, "label", "Set a topic's label", [this, lab] {
      CommandPlan plan;
      plan.subcommand = "topics label";
      plan.inputs["model"] = Abs(lab->model);
      plan.outputs["labels"] = Abs(lab->model) / "labels.json";
      plan.params = {{"topic", lab->topic.ToJson()},
                     {"label", lab->label},
                     {"author", lab->author}};
      if (DryRun(plan)) return kExitOk;
      if (lab->label.empty()) throw UsageError("--label must not be empty");
      TopicModel model = LoadModel(lab->model);
      const int k = lab->topic.Resolve(model);
      const TopicLabel t = LabelTopic(&model, k, lab->label, lab->author,
                                      service::SystemClock());
      WriteFileAtomic(fs::path(lab->model) / "labels.json",
                      model.labels.ToJson().dump(2) + "\n");
      const json j = {{"topic", t.topic},
                      {"label", t.label},
                      {"author", t.author},
                      {"timestamp", t.timestamp}};
      if (lab->json) {
        out_ << j.dump(2) << "\n";
      } else {
        out_ << "topic " << t.topic << " labeled '" << t.label << "'\n";
      }
      return kExitOk;
    });
    AddModel(l, &lab->model);
    lab->topic.Add(l, true);
    l->add_option("--label", lab->label, "Label text")->required();
    l->add_option("--author", lab->author, "Who set the label");
    l->add_flag("--json", lab->json, "Machine-readable output");

    struct Filter {
      std::string model;
      double min_share = 0.5;
      TopicSelector topic;
      bool json = false;
    };
    auto fil = Vars<Filter>();
    auto *f = Sub(topics, "filter", "Documents with a large share of a topic",
                  [this, fil] {
                    CommandPlan plan;
                    plan.subcommand = "topics filter";
                    plan.inputs["model"] = Abs(fil->model);
                    plan.params = {{"topic", fil->topic.ToJson()},
                                   {"min_share", fil->min_share}};
                    if (DryRun(plan)) return kExitOk;
                    const TopicModel model = LoadModel(fil->model);
                    const int k = fil->topic.Resolve(model);
                    const auto shares =
                        FilterByTopic(model, k, fil->min_share);
                    if (fil->json) {
                      json docs = json::array();
                      for (const auto &s : shares) {
                        docs.push_back(
                            {{"doc_id", s.doc_id}, {"share", s.share}});
                      }
                      out_ << json{{"topic", k}, {"documents", docs}}.dump(2)
                           << "\n";
                    } else {
                      out_ << "doc_id\tshare\n";
                      for (const auto &s : shares) {
                        out_ << s.doc_id << "\t" << Fixed(s.share) << "\n";
                      }
                    }
                    return kExitOk;
                  });
    AddModel(f, &fil->model);
    fil->topic.Add(f, true);
    f->add_option("--min-share", fil->min_share, "Minimum theta share");
    f->add_flag("--json", fil->json, "Machine-readable output");

    struct ByMeta {
      std::string model, corpus, field;
      TopicSelector topic;
      bool json = false;
    };
    auto bm = Vars<ByMeta>();
    auto *b = Sub(
        topics, "by-meta", "Mean topic shares per metadata value", [this, bm] {
          CommandPlan plan;
          plan.subcommand = "topics by-meta";
          plan.inputs["model"] = Abs(bm->model);
          plan.inputs["corpus"] = Abs(bm->corpus);
          plan.params = {{"field", bm->field}, {"topic", bm->topic.ToJson()}};
          if (DryRun(plan)) return kExitOk;
          const TopicModel model = LoadModel(bm->model);
          const Corpus corpus = LoadCorpus(bm->corpus);
          const auto groups = TopicByMetadata(model, corpus, bm->field);
          std::optional<int> k;
          if (bm->topic.Given()) k = bm->topic.Resolve(model);
          if (bm->json) {
            json g = json::array();
            for (const auto &[value, mean] : groups) {
              json entry = {{"value", value}, {"size", mean.size}};
              if (k) {
                entry["mean_share"] = mean.mean_theta[*k];
              } else {
                entry["mean_theta"] = mean.mean_theta;
              }
              g.push_back(entry);
            }
            out_ << json{{"field", bm->field},
                         {"topic", k ? json(*k) : json(nullptr)},
                         {"groups", g}}
                        .dump(2)
                 << "\n";
            return kExitOk;
          }
          out_ << bm->field << "\tsize";
          if (k) {
            out_ << "\ttopic_" << *k;
          } else {
            for (int t = 0; t < model.num_topics(); ++t) {
              out_ << "\ttopic_" << t;
            }
          }
          out_ << "\n";
          for (const auto &[value, mean] : groups) {
            out_ << value << "\t" << mean.size;
            if (k) {
              out_ << "\t" << Fixed(mean.mean_theta[*k], 4);
            } else {
              for (double x : mean.mean_theta) out_ << "\t" << Fixed(x, 4);
            }
            out_ << "\n";
          }
          return kExitOk;
        });
    AddModel(b, &bm->model);
    AddCorpus(b, &bm->corpus);
    b->add_option("--field", bm->field, "Metadata field")->required();
    bm->topic.Add(b, false);
    b->add_flag("--json", bm->json, "Machine-readable output");

    struct Coh {
      std::string model, corpus;
      int m = 10;
      bool json = false;
    };
    auto coh = Vars<Coh>();
    auto *c = Sub(topics, "coherence", "UMass coherence per topic", [this,
                                                                     coh] {
      CommandPlan plan;
      plan.subcommand = "topics coherence";
      plan.inputs["model"] = Abs(coh->model);
      plan.inputs["corpus"] = Abs(coh->corpus);
      plan.params = {{"m", coh->m}};
      if (DryRun(plan)) return kExitOk;
      if (coh->m < 2) throw UsageError("--m must be at least 2");
      const TopicModel model = LoadModel(coh->model);
      const DocTermMatrix dtm = ModelDtm(model, LoadCorpus(coh->corpus));
      const auto result = CoherenceUmass(model, dtm, coh->m);
      if (coh->json) {
        out_ << json{{"m", coh->m},
                     {"scores", result.scores},
                     {"skipped_pairs", result.skipped_pairs}}
                    .dump(2)
             << "\n";
      } else {
        out_ << "topic\tcoherence\n";
        for (std::size_t k = 0; k < result.scores.size(); ++k) {
          out_ << k << "\t" << Fixed(result.scores[k], 4) << "\n";
        }
      }
      return kExitOk;
    });
    AddModel(c, &coh->model);
    AddCorpus(c, &coh->corpus);
    c->add_option("--m", coh->m, "Top words per topic");
    c->add_flag("--json", coh->json, "Machine-readable output");

    struct Hl {
      std::string model, corpus, doc;
      double min_weight = 0.0;
      TopicSelector topic;
      bool json = false;
    };
    auto hl = Vars<Hl>();
    auto *h = Sub(topics, "highlight",
                  "Spans of a document assigned to a topic", [this, hl] {
                    CommandPlan plan;
                    plan.subcommand = "topics highlight";
                    plan.inputs["model"] = Abs(hl->model);
                    plan.inputs["corpus"] = Abs(hl->corpus);
                    plan.params = {{"doc", hl->doc},
                                   {"topic", hl->topic.ToJson()},
                                   {"min_weight", hl->min_weight}};
                    if (DryRun(plan)) return kExitOk;
                    const TopicModel model = LoadModel(hl->model);
                    const int k = hl->topic.Resolve(model);
                    const Corpus corpus = LoadCorpus(hl->corpus);
                    const Document *d = corpus.Find(hl->doc);
                    if (!d) throw NotFound("document " + hl->doc + " not found");
                    const Vocabulary vocab =
                        RestoreVocabulary(model.terms, model.term_df,
                                          model.num_docs(), model.params);
                    const DocTermMatrix dtm = BuildDtm({*d}, vocab);
                    const auto spans =
                        Highlight(model, dtm, hl->doc, k, hl->min_weight);
                    if (hl->json) {
                      json s = json::array();
                      for (const auto &x : spans) {
                        s.push_back({{"start", x.span.start},
                                     {"end", x.span.end},
                                     {"topic", x.topic},
                                     {"weight", x.weight}});
                      }
                      out_ << json{{"doc_id", hl->doc},
                                   {"topic", k},
                                   {"spans", s}}
                                  .dump(2)
                           << "\n";
                    } else {
                      out_ << "start\tend\tweight\ttext\n";
                      for (const auto &x : spans) {
                        out_ << x.span.start << "\t" << x.span.end << "\t"
                             << Fixed(x.weight, 4) << "\t"
                             << text::Slice(d->body, x.span.start, x.span.end)
                             << "\n";
                      }
                    }
                    return kExitOk;
                  });
    AddModel(h, &hl->model);
    AddCorpus(h, &hl->corpus);
    h->add_option("--doc", hl->doc, "Document id")->required();
    h->add_option("--min-weight", hl->min_weight,
                  "Minimum relative term weight in [0, 1]");
    hl->topic.Add(h, true);
    h->add_flag("--json", hl->json, "Machine-readable output");
  }

  // The model's document-term matrix rebuilt from the corpus.
  static DocTermMatrix ModelDtm(const TopicModel &model, const Corpus &corpus) {
    std::vector<Document> docs;
    for (const auto &id : model.doc_ids) {
      const Document *d = corpus.Find(id);
      if (!d) throw NotFound("model document " + id + " is not in the corpus");
      docs.push_back(*d);
    }
    const Vocabulary vocab = RestoreVocabulary(model.terms, model.term_df,
                                               model.num_docs(), model.params);
    return BuildDtm(docs, vocab);
  }

  // -------------------------------------------------------------------------
  void AddClassify() {
    auto *classify = Sub(&app_, "classify",
                         "Naive Bayes coding: train, evaluate, simulate",
                         nullptr);
    classify->require_subcommand(1);

    struct Train {
      std::string corpus, out;
      LabelFlags labels;
      AnalysisFlags analysis;
      bool json = false;
    };
    auto tr = Vars<Train>();
    auto *t = Sub(classify, "train", "Train a classifier on labeled documents",
                  [this, tr] {
                    CommandPlan plan;
                    plan.subcommand = "classify train";
                    plan.inputs["corpus"] = Abs(tr->corpus);
                    plan.outputs["model"] = Abs(tr->out);
                    json request = tr->analysis.Build(&plan);
                    tr->labels.Fill(&request, &plan);
                    request["folds"] = 2;
                    const auto parsed = workflow::EvalRequest::FromJson(request);
                    plan.params = parsed.ToJson();
                    plan.params.erase("folds");
                    plan.params.erase("seed");
                    if (DryRun(plan)) return kExitOk;
                    const Corpus corpus = LoadCorpus(tr->corpus);
                    const LabelMap labels = parsed.labels.Resolve(corpus);
                    const Codebook codebook =
                        parsed.codebook ? *parsed.codebook
                                        : workflow::CodebookFromLabels(labels);
                    const Vocabulary vocab = BuildVocabulary(
                        corpus.documents, parsed.preprocessing.Resolve(corpus));
                    const DocTermMatrix dtm = BuildDtm(corpus.documents, vocab);
                    const NaiveBayesModel model =
                        TrainNaiveBayes(dtm, labels, codebook);
                    const json j = model.ToJson();
                    WriteFileAtomic(tr->out, j.dump(2) + "\n");
                    if (tr->json) {
                      out_ << json{{"codes", codebook.Ids()},
                                   {"labeled", labels.size()},
                                   {"vocab_size", vocab.size()}}
                                  .dump(2)
                           << "\n";
                    } else {
                      out_ << "trained on " << labels.size()
                           << " labeled documents, " << vocab.size()
                           << " terms; wrote " << tr->out << "\n";
                    }
                    return kExitOk;
                  });
    AddCorpus(t, &tr->corpus);
    tr->labels.Add(t, false);
    t->add_option("--out", tr->out, "Model JSON file to write")->required();
    t->add_flag("--json", tr->json, "Machine-readable output");
    tr->analysis.Add(t);

    struct Eval {
      std::string corpus, out, csv;
      int folds = 5;
      std::uint64_t seed = 1;
      LabelFlags labels;
      AnalysisFlags analysis;
      bool json = false;
    };
    auto ev = Vars<Eval>();
    auto *e = Sub(classify, "eval", "Stratified k-fold cross-validation",
                  [this, ev] {
                    CommandPlan plan;
                    plan.subcommand = "classify eval";
                    plan.inputs["corpus"] = Abs(ev->corpus);
                    if (!ev->out.empty()) plan.outputs["report"] = Abs(ev->out);
                    if (!ev->csv.empty()) plan.outputs["csv"] = Abs(ev->csv);
                    json request = ev->analysis.Build(&plan);
                    ev->labels.Fill(&request, &plan);
                    request["folds"] = ev->folds;
                    request["seed"] = ev->seed;
                    const auto parsed = workflow::EvalRequest::FromJson(request);
                    plan.params = parsed.ToJson();
                    plan.seed = parsed.seed;
                    if (DryRun(plan)) return kExitOk;
                    const auto output =
                        workflow::RunEval(LoadCorpus(ev->corpus), parsed);
                    if (!ev->out.empty()) {
                      WriteFileAtomic(ev->out, output.files.at("report.json"));
                    }
                    if (!ev->csv.empty()) {
                      WriteFileAtomic(ev->csv, output.files.at("report.csv"));
                    }
                    if (ev->json) {
                      out_ << output.files.at("report.json");
                    } else {
                      out_ << output.files.at("report.csv");
                    }
                    return kExitOk;
                  });
    AddCorpus(e, &ev->corpus);
    ev->labels.Add(e, false);
    e->add_option("--folds", ev->folds, "Number of folds");
    e->add_option("--seed", ev->seed, "Random seed (default 1)");
    e->add_option("--out", ev->out, "EvalReport JSON to write");
    e->add_option("--csv", ev->csv, "EvalReport CSV to write");
    e->add_flag("--json", ev->json, "Print the report as JSON");
    ev->analysis.Add(e);

    struct Sim {
      std::string corpus, out, strategy = "entropy";
      int budget = 50;
      double holdout = 0.3;
      std::uint64_t seed = 1;
      LabelFlags labels;
      AnalysisFlags analysis;
      bool json = false;
    };
    auto sim = Vars<Sim>();
    auto *m = Sub(classify, "simulate",
                  "Simulated active-learning learning curve", [this, sim] {
                    CommandPlan plan;
                    plan.subcommand = "classify simulate";
                    plan.inputs["corpus"] = Abs(sim->corpus);
                    if (!sim->out.empty()) plan.outputs["curve"] = Abs(sim->out);
                    json request = sim->analysis.Build(&plan);
                    sim->labels.Fill(&request, &plan);
                    request["strategy"] = sim->strategy;
                    request["budget"] = sim->budget;
                    request["seed"] = sim->seed;
                    request["holdout_fraction"] = sim->holdout;
                    const auto parsed =
                        workflow::SimulateRequest::FromJson(request);
                    plan.params = parsed.ToJson();
                    plan.seed = parsed.options.seed;
                    if (DryRun(plan)) return kExitOk;
                    const auto output =
                        workflow::RunSimulate(LoadCorpus(sim->corpus), parsed);
                    if (!sim->out.empty()) {
                      WriteFileAtomic(sim->out, output.files.at("curve.csv"));
                    }
                    if (sim->json) {
                      out_ << output.summary.dump(2) << "\n";
                    } else {
                      out_ << output.files.at("curve.csv");
                    }
                    return kExitOk;
                  });
    AddCorpus(m, &sim->corpus);
    sim->labels.Add(m, false);
    m->add_option("--strategy", sim->strategy,
                  "entropy, margin, least_confidence or random");
    m->add_option("--budget", sim->budget, "Queries after the seed labels");
    m->add_option("--holdout", sim->holdout, "Stratified holdout share");
    m->add_option("--seed", sim->seed, "Random seed (default 1)");
    m->add_option("--out", sim->out, "Curve CSV to write");
    m->add_flag("--json", sim->json, "Print a summary as JSON");
    sim->analysis.Add(m);
  }

  // -------------------------------------------------------------------------
  void AddExport() {
    auto *exp = Sub(&app_, "export", "Write exchange formats", nullptr);
    exp->require_subcommand(1);

    struct CorpusCsvVars {
      std::string corpus, out;
    };
    auto cc = Vars<CorpusCsvVars>();
    auto *a = Sub(exp, "corpus-csv", "Corpus as id,title,date,body,<fields>",
                  [this, cc] {
                    CommandPlan plan;
                    plan.subcommand = "export corpus-csv";
                    plan.inputs["corpus"] = Abs(cc->corpus);
                    plan.outputs["csv"] = Abs(cc->out);
                    if (DryRun(plan)) return kExitOk;
                    ExportCorpusCsv(LoadCorpus(cc->corpus), cc->out);
                    err_ << "wrote " << cc->out << "\n";
                    return kExitOk;
                  });
    AddCorpus(a, &cc->corpus);
    a->add_option("--out", cc->out, "CSV file to write")->required();

    struct Qdpx {
      std::string corpus, out, name = "cmwb";
      std::uint64_t seed = 1;
      LabelFlags labels;
    };
    auto q = Vars<Qdpx>();
    auto *b = Sub(exp, "qdpx", "Labeled documents as a REFI-QDA project",
                  [this, q] {
                    CommandPlan plan;
                    plan.subcommand = "export qdpx";
                    plan.inputs["corpus"] = Abs(q->corpus);
                    plan.outputs["qdpx"] = Abs(q->out);
                    json request = json::object();
                    q->labels.Fill(&request, &plan);
                    const auto parsed = workflow::EvalRequest::FromJson(request);
                    plan.params = {{"name", q->name}};
                    plan.seed = q->seed;
                    if (DryRun(plan)) return kExitOk;
                    const Corpus corpus = LoadCorpus(q->corpus);
                    const LabelMap labels = parsed.labels.Resolve(corpus);
                    const Codebook codebook =
                        parsed.codebook ? *parsed.codebook
                                        : workflow::CodebookFromLabels(labels);
                    ExportQdpx(
                        ProjectFromLabels(q->name, corpus, codebook, labels,
                                          q->seed),
                        q->out);
                    err_ << "wrote " << q->out << "\n";
                    return kExitOk;
                  });
    AddCorpus(b, &q->corpus);
    q->labels.Add(b, false);
    b->add_option("--name", q->name, "Project name");
    b->add_option("--seed", q->seed, "Guid seed (default 1)");
    b->add_option("--out", q->out, ".qdpx file to write")->required();

    struct Topics {
      std::string model, out;
    };
    auto tp = Vars<Topics>();
    auto *c = Sub(exp, "topics", "theta.csv and phi.csv", [this, tp] {
      CommandPlan plan;
      plan.subcommand = "export topics";
      plan.inputs["model"] = Abs(tp->model);
      plan.outputs["dir"] = Abs(tp->out);
      if (DryRun(plan)) return kExitOk;
      ExportTopicsCsv(LoadModel(tp->model), tp->out);
      err_ << "wrote " << tp->out << "\n";
      return kExitOk;
    });
    AddModel(c, &tp->model);
    c->add_option("--out", tp->out, "Directory to write")->required();

    struct Labels {
      std::string labels, codebook, out;
    };
    auto lb = Vars<Labels>();
    auto *d = Sub(exp, "labels", "Labels as doc_id,code_id,author,timestamp",
                  [this, lb] {
                    CommandPlan plan;
                    plan.subcommand = "export labels";
                    plan.inputs["labels"] = Abs(lb->labels);
                    plan.outputs["csv"] = Abs(lb->out);
                    if (!lb->codebook.empty()) {
                      plan.inputs["codebook"] = Abs(lb->codebook);
                    }
                    if (DryRun(plan)) return kExitOk;
                    const LabelMap labels = ParseLabelsCsv(ReadFile(lb->labels));
                    const Codebook codebook =
                        lb->codebook.empty()
                            ? workflow::CodebookFromLabels(labels)
                            : ReadCodebook(lb->codebook);
                    std::vector<std::string> docs;
                    for (const auto &[doc, code] : labels) docs.push_back(doc);
                    CodingSession session(codebook, docs, Strategy::kEntropy, 1);
                    for (const auto &[doc, code] : labels) {
                      session.RecordLabel(doc, code);
                    }
                    ExportLabelsCsv(session, lb->out);
                    err_ << "wrote " << lb->out << "\n";
                    return kExitOk;
                  });
    d->add_option("--labels", lb->labels, "CSV with doc_id,code_id")
        ->required()
        ->check(CLI::ExistingFile);
    d->add_option("--codebook", lb->codebook, "Codebook CSV or JSON")
        ->check(CLI::ExistingFile);
    d->add_option("--out", lb->out, "CSV file to write")->required();
  }

  // -------------------------------------------------------------------------
  void AddServe() {
    struct V {
      std::string host = "127.0.0.1", data_dir = "cmwb-data", ui_dir;
      int port = 8080;
      int workers = 2;
    };
    auto v = Vars<V>();
    auto *app = Sub(&app_, "serve", "Run the HTTP API", [this, v] {
      CommandPlan plan;
      plan.subcommand = "serve";
      plan.outputs["data_dir"] = Abs(v->data_dir);
      if (!v->ui_dir.empty()) plan.inputs["ui_dir"] = Abs(v->ui_dir);
      plan.params = {{"host", v->host},
                     {"port", v->port},
                     {"workers", v->workers}};
      if (DryRun(plan)) return kExitOk;
      if (v->workers < 1) throw UsageError("--workers must be at least 1");
      service::Service svc({Abs(v->data_dir), v->workers});
      return service::ServeHttp(&svc, v->host, v->port,
                                v->ui_dir.empty() ? fs::path()
                                                  : Abs(v->ui_dir));
    });
    app->add_option("--host", v->host, "Listen address");
    app->add_option("--port", v->port, "Listen port")->envname("CM_PORT");
    app->add_option("--data-dir", v->data_dir, "Project storage directory")
        ->envname("CM_DATA_DIR");
    app->add_option("--ui-dir", v->ui_dir, "Static files served under /ui/")
        ->check(CLI::ExistingDirectory);
    app->add_option("--workers", v->workers, "Job worker threads");
  }

  std::ostream &out_;
  std::ostream &err_;
  CLI::App app_;
  bool dry_run_ = false;
  std::deque<Command> commands_;
};

}  // namespace

json CommandPlan::ToJson() const {
  json in = json::object();
  for (const auto &[k, p] : inputs) in[k] = p.string();
  json outp = json::object();
  for (const auto &[k, p] : outputs) outp[k] = p.string();
  return {{"subcommand", subcommand},
          {"params", params},
          {"inputs", in},
          {"outputs", outp},
          {"seed", seed ? json(*seed) : json(nullptr)}};
}

int Execute(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  Cli cli(out, err);
  return cli.Run(args);
}

}  // namespace cmwb::cli
