// Copyright 2026 The MGCTM Authors.
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

#include "mgctm/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mgctm/baselines.hpp"
#include "mgctm/corpus.hpp"
#include "mgctm/error.hpp"
#include "mgctm/eval.hpp"
#include "mgctm/io.hpp"
#include "mgctm/log.hpp"
#include "mgctm/model.hpp"
#include "mgctm/serialization.hpp"

namespace mgctm::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kMethods = {"mgctm", "lda-naive", "lda-kmeans", "kmeans"};

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
  return buf;
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + ": no such file: " + path);
}

void require_writable(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw UsageError(std::string(flag) + ": no such directory: " + parent.string());
  }
}

std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

struct CorpusFlags {
  std::string corpus, vocab, labels;

  void add(CLI::App* app, bool labels_flag = true) {
    app->add_option("--corpus", corpus, "bag-of-words file (D V NNZ header, 1-based ids)");
    app->add_option("--vocab", vocab, "vocabulary, one token per line");
    if (labels_flag) app->add_option("--labels", labels, "class labels, one integer per line");
  }

  void check(bool need_corpus) const {
    if (need_corpus || !corpus.empty()) require_file(corpus, "--corpus");
    if (!vocab.empty()) require_file(vocab, "--vocab");
    if (!labels.empty()) require_file(labels, "--labels");
  }

  LoadedCorpus load() const {
    LoadedCorpus c = load_bow(corpus, optional_path(vocab), optional_path(labels));
    if (!c.report.dropped_empty_docs.empty()) {
      log::warn("dropped " + std::to_string(c.report.dropped_empty_docs.size()) +
                " empty documents");
    }
    return c;
  }
};

// Flags mirroring HyperConfig. A --config file supplies the base and
// flags given on the command line override it.
struct ModelFlags {
  std::string config;
  int clusters = 0, local_topics = 0, global_topics = 0, max_em_iters = 0, e_step_iters = 0;
  double tol = 0;
  std::string init = "random";
  std::string init_labels;
  std::string prior_update = "every-iter";
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool config_flag = true) {
    if (config_flag) opts["config"] = app->add_option("--config", config, "config or model JSON file");
    opts["clusters"] = app->add_option("--clusters", clusters, "number of clusters J");
    opts["local"] = app->add_option("--local-topics", local_topics, "local topics per cluster K");
    opts["global"] = app->add_option("--global-topics", global_topics, "global topics R");
    opts["em"] = app->add_option("--max-em-iters", max_em_iters, "EM iterations");
    opts["estep"] = app->add_option("--e-step-iters", e_step_iters, "inner rounds per document");
    opts["tol"] = app->add_option("--tol", tol, "relative ELBO change for convergence");
    opts["init"] = app->add_option("--init", init, "initialization")
                       ->check(CLI::IsMember({"random", "lda-naive"}));
    opts["init_labels"] =
        app->add_option("--init-labels", init_labels, "initial clusters, one per line");
    opts["prior"] = app->add_option("--prior-update", prior_update, "Dirichlet prior updates")
                        ->check(CLI::IsMember({"every-iter", "fixed"}));
  }

  bool given(const char* key) const {
    auto it = opts.find(key);
    return it != opts.end() && it->second->count() > 0;
  }

  // `config_path` overrides --config.
  HyperConfig resolve(const std::string* config_path = nullptr) const {
    HyperConfig c;
    const std::string* path = config_path ? config_path : given("config") ? &config : nullptr;
    if (path) {
      require_file(*path, "--config");
      c = config_from_json(io::read_file(*path));
    }
    if (given("clusters")) c.num_clusters = clusters;
    if (given("local")) c.local_topics = local_topics;
    if (given("global")) c.global_topics = global_topics;
    if (given("em")) c.max_em_iters = max_em_iters;
    if (given("estep")) c.e_step_iters = e_step_iters;
    if (given("tol")) c.elbo_rel_tol = tol;
    if (given("prior")) {
      c.prior_update = prior_update == "fixed" ? PriorUpdate::kFixed : PriorUpdate::kEveryIter;
    }
    if (lda_init() || given("init_labels")) c.init_scheme = InitScheme::kFromLabels;
    if (given("init") && init == "random") c.init_scheme = InitScheme::kRandom;
    if (lda_init() && given("init_labels")) {
      throw UsageError("--init lda-naive and --init-labels are exclusive");
    }
    if (given("init_labels")) require_file(init_labels, "--init-labels");
    if (c.init_scheme == InitScheme::kFromLabels && !lda_init() && !given("init_labels")) {
      throw UsageError("from_labels initialization needs --init lda-naive or --init-labels");
    }
    return c;
  }

  bool lda_init() const { return given("init") && init == "lda-naive"; }
};

struct RunFlags {
  std::uint64_t seed = 1;
  int threads = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void add(CLI::App* app) {
    seed_opt = app->add_option("--seed", seed, "random seed");
    threads_opt = app->add_option("--threads", threads, "worker threads (results do not depend on it)")
                      ->check(CLI::PositiveNumber);
  }

  void apply(HyperConfig& c) const {
    if (seed_opt->count()) c.seed = seed;
    if (threads_opt->count()) c.threads = threads;
  }
};

// Fits MGCTM, building initial clusters from LDA+Naive or a labels file
// when asked.
FitResult fit_mgctm(const Corpus& corpus, const HyperConfig& config, const ModelFlags& flags,
                    const IterationCallback& on_iteration) {
  std::optional<ClusterLabels> init;
  if (flags.lda_init()) {
    LdaOptions lda;
    lda.num_topics = config.num_clusters;
    lda.seed = config.seed;
    lda.threads = config.threads;
    init = lda_naive_cluster(fit_lda(corpus, lda));
  } else if (config.init_scheme == InitScheme::kFromLabels) {
    auto labels = parse_labels(io::read_file(flags.init_labels));
    if (labels.size() != corpus.num_docs()) {
      throw DimensionError("--init-labels has " + std::to_string(labels.size()) +
                           " entries, corpus has " + std::to_string(corpus.num_docs()) +
                           " documents");
    }
    init = ClusterLabels(std::move(labels), config.num_clusters);
  }
  return fit(corpus, config, init, on_iteration);
}

void print_metrics(std::ostream& out, const ClusterLabels& pred, const ClusterLabels& truth) {
  out << "ac=" << percent(clustering_accuracy(pred, truth)) << '\n';
  out << "nmi=" << percent(nmi(pred, truth)) << '\n';
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  CorpusFlags data;
  ModelFlags model;
  RunFlags run;
  std::string model_out, report_out;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  a.data.check(true);
  require_writable(a.model_out, "--model");
  const std::string report_path = a.report_out.empty() ? a.model_out + ".report.json" : a.report_out;
  require_writable(report_path, "--report");
  HyperConfig config = a.model.resolve();
  a.run.apply(config);
  config.validate();
  const LoadedCorpus data = a.data.load();

  FitResult result = fit_mgctm(data.corpus, config, a.model, [&](int iter, double value) {
    if (!a.quiet) out << "iter=" << iter << " elbo=" << number(value) << '\n';
  });
  const ClusterLabels pred = predict_clusters(result.states);
  SavedModel saved{config, std::move(result.params), pred.labels()};
  const std::string model_text = model_to_json(saved);
  const std::string report_text = report_to_json(result.report);
  io::write_file_atomic(report_path, report_text);
  io::write_file_atomic(a.model_out, model_text);

  out << "iterations=" << result.report.iterations_run << '\n';
  out << "converged=" << (result.report.converged ? 1 : 0) << '\n';
  if (data.corpus.has_labels()) {
    print_metrics(out, pred, ClusterLabels::from_vector(data.corpus.labels()));
  }
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  CorpusFlags data;
  RunFlags run;
  std::string method = "mgctm";
  std::string model_path, predictions_out, lda_out;
  int clusters = 0, lda_topics = 0, e_step_iters = 0;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.data.labels.empty()) throw UsageError("--labels is required");
  if (a.method == "mgctm" && a.model_path.empty()) throw UsageError("--model is required for mgctm");
  a.data.check(a.model_path.empty());
  if (!a.model_path.empty()) require_file(a.model_path, "--model");
  if (a.method == "kmeans" && !a.model_path.empty()) throw UsageError("kmeans takes no --model");
  if (!a.predictions_out.empty()) require_writable(a.predictions_out, "--predictions");
  if (!a.lda_out.empty()) {
    if (a.method != "lda-naive" && a.method != "lda-kmeans") {
      throw UsageError("--lda-out only applies to the LDA methods");
    }
    require_writable(a.lda_out, "--lda-out");
  }

  std::optional<LoadedCorpus> data;
  if (!a.data.corpus.empty()) data = a.data.load();
  const std::vector<int> truth_vec =
      data ? data->corpus.labels() : parse_labels(io::read_file(a.data.labels));
  const ClusterLabels truth = ClusterLabels::from_vector(truth_vec);
  const int k = a.clusters > 0 ? a.clusters : truth.num_clusters();

  ClusterLabels pred;
  std::optional<SavedLda> lda;
  if (a.method == "mgctm") {
    const SavedModel model = load_model(a.model_path);
    if (data) {
      HyperConfig c = model.config;
      a.run.apply(c);
      if (a.e_step_iters > 0) c.e_step_iters = a.e_step_iters;
      pred = predict_clusters(infer_states(data->corpus, model.params, c));
    } else {
      if (model.doc_clusters.empty()) {
        throw UsageError("model stores no document clusters; pass --corpus");
      }
      pred = ClusterLabels(model.doc_clusters, model.params.num_clusters);
    }
  } else if (a.method == "kmeans") {
    KMeansOptions km;
    km.k = k;
    km.seed = a.run.seed;
    pred = kmeans(tfidf_vectors(data->corpus), km).labels;
  } else {
    if (!a.model_path.empty()) {
      lda = lda_from_json(io::read_file(a.model_path));
      if (data && data->corpus.num_docs() != lda->model.doc_theta.rows) {
        throw DimensionError("LDA model covers " + std::to_string(lda->model.doc_theta.rows) +
                             " documents, corpus has " + std::to_string(data->corpus.num_docs()));
      }
    } else {
      SavedLda fitted;
      fitted.options.num_topics =
          a.lda_topics > 0 ? a.lda_topics : (a.method == "lda-naive" ? k : LdaOptions{}.num_topics);
      fitted.options.seed = a.run.seed;
      fitted.options.threads = a.run.threads;
      fitted.model = fit_lda(data->corpus, fitted.options);
      lda = std::move(fitted);
    }
    if (a.method == "lda-naive") {
      pred = lda_naive_cluster(lda->model);
    } else {
      KMeansOptions km;
      km.k = k;
      km.seed = a.run.seed;
      pred = kmeans(topic_proportions(lda->model), km).labels;
    }
  }
  if (pred.size() != truth.size()) {
    throw DimensionError("predictions cover " + std::to_string(pred.size()) +
                         " documents, labels have " + std::to_string(truth.size()));
  }

  if (lda && !a.lda_out.empty() && a.model_path.empty()) io::write_file_atomic(a.lda_out, lda_to_json(*lda));
  if (!a.predictions_out.empty()) io::write_file_atomic(a.predictions_out, format_labels(pred.labels()));
  print_metrics(out, pred, truth);
  return kExitOk;
}

// --------------------------------------------------------------- topics

struct TopicsArgs {
  std::string model_path, vocab;
  std::size_t top_n = 10;
  std::string scope = "all";
  int cluster = -1;
};

int cmd_topics(const TopicsArgs& a, std::ostream& out) {
  require_file(a.model_path, "--model");
  if (!a.vocab.empty()) require_file(a.vocab, "--vocab");
  if (a.top_n < 1) throw UsageError("--top-n must be >= 1");
  const SavedModel model = load_model(a.model_path);
  const ModelParams& p = model.params;
  const Vocabulary vocab = a.vocab.empty() ? Vocabulary::synthetic(p.vocab_size)
                                           : parse_vocab(io::read_file(a.vocab));
  if (vocab.size() != p.vocab_size) {
    throw DimensionError("vocabulary has " + std::to_string(vocab.size()) +
                         " tokens, model has V=" + std::to_string(p.vocab_size));
  }
  if (a.cluster >= p.num_clusters) {
    throw UsageError("--cluster " + std::to_string(a.cluster) + " outside [0, " +
                     std::to_string(p.num_clusters) + ")");
  }

  std::ostringstream table;
  auto row = [&](const TopicRef& ref) {
    table << "topic " << ref.topic << ":";
    for (WordId w : top_words(p, ref, a.top_n)) table << ' ' << vocab.token(w);
    table << '\n';
  };
  if (a.scope != "local" && a.cluster < 0) {
    table << "[global]\n";
    for (int k = 0; k < p.global_topics; ++k) row({TopicScope::kGlobal, 0, k});
  }
  if (a.scope != "global") {
    for (int j = 0; j < p.num_clusters; ++j) {
      if (a.cluster >= 0 && j != a.cluster) continue;
      table << "[cluster " << j << "]\n";
      for (int k = 0; k < p.local_topics; ++k) row({TopicScope::kLocal, j, k});
    }
  }
  out << table.str();
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string params_path, out_prefix;
  GeneratorSpec gen;
  CLI::Option* gen_seed_opt = nullptr;
  long long docs = -1;
  double doc_length = 100;
  std::string length_dist = "fixed";
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.docs < 1) throw UsageError("--docs must be >= 1");
  if (!(a.doc_length >= 1)) throw UsageError("--doc-length must be >= 1");
  require_writable(a.out_prefix + ".bow", "--out");
  ModelParams params;
  if (!a.params_path.empty()) {
    require_file(a.params_path, "--params");
    params = load_model(a.params_path).params;
  } else {
    GeneratorSpec g = a.gen;
    if (!a.gen_seed_opt->count()) g.seed = a.seed;
    if (g.num_clusters < 1 || g.local_topics < 1 || g.global_topics < 1 || g.vocab_size < 1) {
      throw UsageError("generator dimensions must be positive");
    }
    if (!(g.topic_concentration > 0)) throw UsageError("--concentration must be positive");
    params = random_params(g);
  }
  params.validate(1e-6);
  DocLengthSpec len;
  len.kind = a.length_dist == "poisson" ? DocLengthSpec::Kind::kPoisson : DocLengthSpec::Kind::kFixed;
  len.value = a.doc_length;
  const SampledCorpus s = sample_corpus(params, static_cast<std::size_t>(a.docs), len, a.seed);

  HyperConfig shape;
  shape.num_clusters = params.num_clusters;
  shape.local_topics = params.local_topics;
  shape.global_topics = params.global_topics;
  const std::string bow = format_bow(s.corpus);
  const std::string vocab = format_vocab(Vocabulary::synthetic(params.vocab_size));
  const std::string labels = format_labels(s.corpus.labels());
  const std::string hidden = hidden_to_jsonl(s.hidden);
  const std::string truth = model_to_json({shape, params, s.corpus.labels()});
  io::write_file_atomic(a.out_prefix + ".bow", bow);
  io::write_file_atomic(a.out_prefix + ".vocab", vocab);
  io::write_file_atomic(a.out_prefix + ".labels", labels);
  io::write_file_atomic(a.out_prefix + ".hidden.jsonl", hidden);
  io::write_file_atomic(a.out_prefix + ".params.json", truth);
  out << "docs=" << s.corpus.num_docs() << '\n';
  out << "tokens=" << s.corpus.total_tokens() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  CorpusFlags data;
  ModelFlags model;
  RunFlags run;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> configs;
  std::vector<std::string> quoted;
  std::string report_out;
  int lda_topics = 0;
};

struct QuotedRow {
  std::string name, ac, nmi;
};

QuotedRow parse_quoted(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3 || parts[0].empty()) throw UsageError("--quoted expects NAME:AC:NMI, got " + s);
  for (int i = 1; i < 3; ++i) {
    try {
      std::size_t used = 0;
      std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw UsageError("--quoted value is not a number: " + parts[i]);
    }
  }
  return {parts[0], parts[1], parts[2]};
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  a.data.check(true);
  require_writable(a.report_out, "--out");
  if (a.data.labels.empty()) throw UsageError("--labels is required");
  std::vector<std::string> methods;
  std::set<std::string> seen;
  for (const auto& m : a.methods.empty() ? kMethods : a.methods) {
    if (!seen.insert(m).second) {
      log::warn("duplicate method '" + m + "' ignored");
      continue;
    }
    methods.push_back(m);
  }
  std::vector<QuotedRow> quoted;
  for (const auto& q : a.quoted) quoted.push_back(parse_quoted(q));

  // One grid point per --config file, or the flags alone.
  std::vector<std::pair<std::string, HyperConfig>> grid;
  const ModelFlags& flags = a.model;
  if (a.configs.empty()) {
    grid.emplace_back("default", flags.resolve());
  } else {
    for (const auto& path : a.configs) grid.emplace_back(fs::path(path).stem().string(), flags.resolve(&path));
  }
  const LoadedCorpus data = a.data.load();
  const ClusterLabels truth = ClusterLabels::from_vector(data.corpus.labels());
  const int k = a.model.given("clusters") ? a.model.clusters : truth.num_clusters();
  for (auto& [name, c] : grid) {
    if (!a.model.given("clusters")) c.num_clusters = k;
    a.run.apply(c);
    c.validate();
  }

  std::ostringstream table;
  table << "method\tconfig\tseed\tac\tnmi\tstatus\n";
  bool failed = false;
  auto run_rows = [&](const std::string& method, const std::string& config_name,
                      const HyperConfig* config) {
    double sum_ac = 0, sum_nmi = 0;
    int ok = 0;
    for (std::uint64_t seed : a.seeds) {
      table << method << '\t' << config_name << '\t' << seed << '\t';
      try {
        ClusterLabels pred;
        if (method == "mgctm") {
          HyperConfig c = *config;
          c.seed = seed;
          pred = predict_clusters(fit_mgctm(data.corpus, c, flags, {}).states);
        } else if (method == "kmeans") {
          KMeansOptions km;
          km.k = k;
          km.seed = seed;
          pred = kmeans(tfidf_vectors(data.corpus), km).labels;
        } else {
          LdaOptions lda;
          lda.num_topics = method == "lda-naive" ? k : (a.lda_topics > 0 ? a.lda_topics : lda.num_topics);
          lda.seed = seed;
          lda.threads = a.run.threads;
          if (method == "lda-naive") {
            pred = lda_naive_cluster(fit_lda(data.corpus, lda));
          } else {
            KMeansOptions km;
            km.k = k;
            km.seed = seed;
            pred = lda_kmeans(data.corpus, lda, km);
          }
        }
        const double ac = clustering_accuracy(pred, truth), mi = nmi(pred, truth);
        sum_ac += ac;
        sum_nmi += mi;
        ++ok;
        table << percent(ac) << '\t' << percent(mi) << "\tok\n";
      } catch (const std::exception& e) {
        failed = true;
        log::warn(method + " seed " + std::to_string(seed) + " failed: " + e.what());
        table << "NA\tNA\tfailed: " << one_line(e.what()) << '\n';
      }
    }
    if (a.seeds.size() < 2) return;
    table << method << '\t' << config_name << "\tmean\t";
    if (ok > 0) {
      table << percent(sum_ac / ok) << '\t' << percent(sum_nmi / ok) << '\t'
            << (ok == static_cast<int>(a.seeds.size()) ? "ok" : "partial") << '\n';
    } else {
      table << "NA\tNA\tfailed\n";
    }
  };
  for (const auto& method : methods) {
    if (method == "mgctm") {
      for (const auto& [name, c] : grid) run_rows(method, name, &c);
    } else {
      run_rows(method, "-", nullptr);
    }
  }
  for (const auto& q : quoted) {
    table << q.name << "\t-\t-\t" << q.ac << '\t' << q.nmi << "\tquoted\n";
  }
  io::write_file_atomic(a.report_out, table.str());
  out << table.str();
  return failed ? kExitPartial : kExitOk;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IndexError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error in " << e.block() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

struct SinkGuard {
  explicit SinkGuard(std::ostream& err) {
    log::set_sink([&err](const std::string& m) { err << m << '\n'; });
  }
  ~SinkGuard() {
    log::set_sink([](const std::string& m) { std::cerr << m << '\n'; });
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  SinkGuard sink(err);
  CLI::App app{"Multi-grain clustering topic model", "mgctm"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "fit MGCTM and write the model and fit report");
  train.data.add(t);
  train.model.add(t);
  train.run.add(t);
  t->add_option("--model", train.model_out, "output model file")->required();
  t->add_option("--report", train.report_out, "output report file (default <model>.report.json)");
  t->add_flag("--quiet", train.quiet, "do not print the ELBO trace");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "print clustering accuracy and NMI");
  ev.data.add(e);
  ev.run.add(e);
  e->add_option("--method", ev.method, "method")->check(CLI::IsMember(kMethods));
  e->add_option("--model", ev.model_path, "MGCTM model, or LDA model for the LDA methods");
  e->add_option("--clusters", ev.clusters, "clusters for K-means (default: number of classes)");
  e->add_option("--lda-topics", ev.lda_topics, "LDA topics (default: clusters for lda-naive, 60 otherwise)");
  e->add_option("--e-step-iters", ev.e_step_iters, "inner rounds when inferring clusters");
  e->add_option("--predictions", ev.predictions_out, "write predicted clusters here");
  e->add_option("--lda-out", ev.lda_out, "write the fitted LDA model here");

  TopicsArgs tp;
  auto* o = app.add_subcommand("topics", "print the most probable words of each topic");
  o->add_option("--model", tp.model_path, "model file")->required();
  o->add_option("--vocab", tp.vocab, "vocabulary file");
  o->add_option("--top-n", tp.top_n, "words per topic");
  o->add_option("--scope", tp.scope, "which topics")->check(CLI::IsMember({"all", "global", "local"}));
  o->add_option("--cluster", tp.cluster, "only this cluster's local topics");

  SynthArgs sy;
  auto* s = app.add_subcommand("synth", "sample a synthetic corpus");
  s->add_option("--params", sy.params_path, "model file to sample from");
  s->add_option("--clusters", sy.gen.num_clusters, "generator clusters");
  s->add_option("--local-topics", sy.gen.local_topics, "generator local topics");
  s->add_option("--global-topics", sy.gen.global_topics, "generator global topics");
  s->add_option("--vocab-size", sy.gen.vocab_size, "generator vocabulary size");
  s->add_option("--concentration", sy.gen.topic_concentration, "Dirichlet concentration of topic rows");
  sy.gen_seed_opt = s->add_option("--gen-seed", sy.gen.seed, "seed for the parameters (default --seed)");
  s->add_option("--docs", sy.docs, "number of documents")->required();
  s->add_option("--doc-length", sy.doc_length, "document length, or its mean");
  s->add_option("--length-dist", sy.length_dist, "document length distribution")
      ->check(CLI::IsMember({"fixed", "poisson"}));
  s->add_option("--seed", sy.seed, "sampling seed");
  s->add_option("--out", sy.out_prefix, "output prefix")->required();

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "compare methods over seeds and write a report");
  bn.data.add(b);
  bn.model.add(b, false);
  bn.run.add(b);
  b->add_option("--config", bn.configs, "MGCTM config files, one grid point each");
  b->add_option("--methods", bn.methods, "methods to run")
      ->delimiter(',')
      ->check(CLI::IsMember(kMethods));
  b->add_option("--seeds", bn.seeds, "seeds")->delimiter(',');
  b->add_option("--lda-topics", bn.lda_topics, "LDA topics for lda-kmeans");
  b->add_option("--quoted", bn.quoted, "context row NAME:AC:NMI, marked quoted");
  b->add_option("--out", bn.report_out, "report file (tab-separated)")->required();

  std::vector<std::string> argv_store{"mgctm"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (t->parsed()) return guarded(err, [&] { return cmd_train(train, out); });
  if (e->parsed()) return guarded(err, [&] { return cmd_eval(ev, out); });
  if (o->parsed()) return guarded(err, [&] { return cmd_topics(tp, out); });
  if (s->parsed()) return guarded(err, [&] { return cmd_synth(sy, out); });
  return guarded(err, [&] { return cmd_bench(bn, out); });
}

}  // namespace mgctm::cli
