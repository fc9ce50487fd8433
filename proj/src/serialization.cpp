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

#include "mgctm/serialization.hpp"

#include <set>
#include <sstream>

#include "json.hpp"
#include "mgctm/error.hpp"
#include "mgctm/io.hpp"

namespace mgctm {

using Json = nlohmann::ordered_json;

namespace {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
}

void check_header(const Json& j, const std::string& format) {
  if (!j.is_object()) throw ParseError("expected a JSON object", 0);
  if (!j.contains("format") || !j["format"].is_string()) {
    throw ParseError("missing \"format\" field", 0);
  }
  const auto found = j["format"].get<std::string>();
  if (found != format) throw ParseError("expected format \"" + format + "\", got \"" + found + "\"", 0);
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw ParseError("missing \"version\" field", 0);
  }
  const int version = j["version"].get<int>();
  if (version < 1 || version > kFormatVersion) {
    throw ParseError("unsupported " + format + " version " + std::to_string(version), 0);
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ParseError("unknown key \"" + item.key() + "\" in " + where, 0);
  }
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError("missing \"" + std::string(key) + "\" in " + where, 0);
  return j[key];
}

template <class T>
T as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ParseError("wrong type for " + what, 0);
  }
}

std::vector<double> flat_rows(const Json& j, std::size_t rows, std::size_t cols,
                              const std::string& what) {
  if (!j.is_array() || j.size() != rows) {
    throw DimensionError(what + ": expected " + std::to_string(rows) + " rows");
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& row : j) {
    auto v = as<std::vector<double>>(row, what);
    if (v.size() != cols) throw DimensionError(what + ": expected rows of length " + std::to_string(cols));
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

Json rows_json(const double* data, std::size_t rows, std::size_t cols) {
  Json out = Json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    out.push_back(std::vector<double>(data + r * cols, data + (r + 1) * cols));
  }
  return out;
}

Json config_json(const HyperConfig& c) {
  Json j;
  j["num_clusters"] = c.num_clusters;
  j["local_topics"] = c.local_topics;
  j["global_topics"] = c.global_topics;
  j["max_em_iters"] = c.max_em_iters;
  j["e_step_iters"] = c.e_step_iters;
  j["elbo_rel_tol"] = c.elbo_rel_tol;
  j["e_step_rel_tol"] = c.e_step_rel_tol;
  j["seed"] = c.seed;
  j["init_scheme"] = init_scheme_name(c.init_scheme);
  j["prior_update"] = prior_update_name(c.prior_update);
  j["threads"] = c.threads;
  j["retain_word_state"] = c.retain_word_state;
  j["init_restarts"] = c.init_restarts;
  j["init_restart_iters"] = c.init_restart_iters;
  return j;
}

HyperConfig config_from(const Json& j, HyperConfig c) {
  if (!j.is_object()) throw ParseError("config must be an object", 0);
  reject_unknown(j,
                 {"num_clusters", "local_topics", "global_topics", "max_em_iters", "e_step_iters",
                  "elbo_rel_tol", "e_step_rel_tol", "seed", "init_scheme", "prior_update",
                  "threads", "retain_word_state", "init_restarts", "init_restart_iters"},
                 "config");
  auto set = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = as<std::decay_t<decltype(dst)>>(j[key], std::string("config.") + key);
  };
  set("num_clusters", c.num_clusters);
  set("local_topics", c.local_topics);
  set("global_topics", c.global_topics);
  set("max_em_iters", c.max_em_iters);
  set("e_step_iters", c.e_step_iters);
  set("elbo_rel_tol", c.elbo_rel_tol);
  set("e_step_rel_tol", c.e_step_rel_tol);
  set("seed", c.seed);
  set("threads", c.threads);
  set("retain_word_state", c.retain_word_state);
  set("init_restarts", c.init_restarts);
  set("init_restart_iters", c.init_restart_iters);
  if (j.contains("init_scheme")) {
    c.init_scheme = parse_init_scheme(as<std::string>(j["init_scheme"], "config.init_scheme"));
  }
  if (j.contains("prior_update")) {
    c.prior_update = parse_prior_update(as<std::string>(j["prior_update"], "config.prior_update"));
  }
  c.validate();
  return c;
}

}  // namespace

std::string init_scheme_name(InitScheme scheme) {
  return scheme == InitScheme::kRandom ? "random" : "from_labels";
}

InitScheme parse_init_scheme(const std::string& name) {
  if (name == "random") return InitScheme::kRandom;
  if (name == "from_labels") return InitScheme::kFromLabels;
  throw ConfigError("unknown init scheme \"" + name + "\"");
}

std::string prior_update_name(PriorUpdate mode) {
  return mode == PriorUpdate::kEveryIter ? "every_iter" : "fixed";
}

PriorUpdate parse_prior_update(const std::string& name) {
  if (name == "every_iter") return PriorUpdate::kEveryIter;
  if (name == "fixed") return PriorUpdate::kFixed;
  throw ConfigError("unknown prior update mode \"" + name + "\"");
}

std::string model_to_json(const SavedModel& m) {
  const ModelParams& p = m.params;
  const std::size_t J = p.num_clusters, K = p.local_topics, R = p.global_topics, V = p.vocab_size;
  Json params;
  params["num_clusters"] = p.num_clusters;
  params["local_topics"] = p.local_topics;
  params["global_topics"] = p.global_topics;
  params["vocab_size"] = p.vocab_size;
  params["pi"] = p.pi;
  params["gamma"] = std::vector<double>(p.gamma.begin(), p.gamma.end());
  params["local_priors"] = rows_json(p.local_priors.data(), J, K);
  params["global_prior"] = p.global_prior;
  Json local = Json::array();
  for (std::size_t j = 0; j < J; ++j) {
    local.push_back(rows_json(p.local_topic_words.data() + j * K * V, K, V));
  }
  params["local_topic_words"] = std::move(local);
  params["global_topic_words"] = rows_json(p.global_topic_words.data(), R, V);

  Json out;
  out["format"] = "mgctm-model";
  out["version"] = kFormatVersion;
  out["config"] = config_json(m.config);
  out["params"] = std::move(params);
  out["doc_clusters"] = m.doc_clusters;
  return out.dump(1) + "\n";
}

SavedModel model_from_json(const std::string& text) {
  const Json j = parse_json(text);
  check_header(j, "mgctm-model");
  reject_unknown(j, {"format", "version", "config", "params", "doc_clusters"}, "model");
  SavedModel m;
  m.config = config_from(field(j, "config", "model"), HyperConfig{});
  const Json& p = field(j, "params", "model");
  reject_unknown(p,
                 {"num_clusters", "local_topics", "global_topics", "vocab_size", "pi", "gamma",
                  "local_priors", "global_prior", "local_topic_words", "global_topic_words"},
                 "params");
  const int J = as<int>(field(p, "num_clusters", "params"), "params.num_clusters");
  const int K = as<int>(field(p, "local_topics", "params"), "params.local_topics");
  const int R = as<int>(field(p, "global_topics", "params"), "params.global_topics");
  const auto V = as<std::size_t>(field(p, "vocab_size", "params"), "params.vocab_size");
  if (J < 1 || K < 1 || R < 1 || V < 1) throw DomainError("model dimensions must be positive");
  ModelParams params(J, K, R, V);
  params.pi = as<std::vector<double>>(field(p, "pi", "params"), "params.pi");
  if (params.pi.size() != static_cast<std::size_t>(J)) throw DimensionError("params.pi has wrong length");
  const auto gamma = as<std::vector<double>>(field(p, "gamma", "params"), "params.gamma");
  if (gamma.size() != 2) throw DimensionError("params.gamma must have two entries");
  params.gamma = {gamma[0], gamma[1]};
  params.local_priors = flat_rows(field(p, "local_priors", "params"), J, K, "params.local_priors");
  params.global_prior = as<std::vector<double>>(field(p, "global_prior", "params"), "params.global_prior");
  if (params.global_prior.size() != static_cast<std::size_t>(R)) {
    throw DimensionError("params.global_prior has wrong length");
  }
  const Json& local = field(p, "local_topic_words", "params");
  if (!local.is_array() || local.size() != static_cast<std::size_t>(J)) {
    throw DimensionError("params.local_topic_words: expected one block per cluster");
  }
  params.local_topic_words.clear();
  for (const auto& block : local) {
    const auto rows = flat_rows(block, K, V, "params.local_topic_words");
    params.local_topic_words.insert(params.local_topic_words.end(), rows.begin(), rows.end());
  }
  params.global_topic_words = flat_rows(field(p, "global_topic_words", "params"), R, V,
                                        "params.global_topic_words");
  if (m.config.num_clusters != J || m.config.local_topics != K || m.config.global_topics != R) {
    throw DimensionError("model config shape does not match its parameters");
  }
  params.validate(1e-6);
  m.params = std::move(params);
  if (j.contains("doc_clusters")) {
    m.doc_clusters = as<std::vector<int>>(j["doc_clusters"], "doc_clusters");
    for (int c : m.doc_clusters) {
      if (c < 0 || c >= J) throw DomainError("doc_clusters entry outside [0, J)");
    }
  }
  return m;
}

void save_model(const std::filesystem::path& path, const SavedModel& model) {
  io::write_file_atomic(path, model_to_json(model));
}

SavedModel load_model(const std::filesystem::path& path) {
  return model_from_json(io::read_file(path));
}

std::string config_to_json(const HyperConfig& config) {
  Json out;
  out["format"] = "mgctm-config";
  out["version"] = kFormatVersion;
  out["config"] = config_json(config);
  return out.dump(1) + "\n";
}

HyperConfig config_from_json(const std::string& text, const HyperConfig& base) {
  const Json j = parse_json(text);
  if (j.is_object() && j.contains("format") && j["format"] == "mgctm-model") {
    check_header(j, "mgctm-model");
    return config_from(field(j, "config", "model"), base);
  }
  check_header(j, "mgctm-config");
  reject_unknown(j, {"format", "version", "config"}, "config file");
  return config_from(field(j, "config", "config file"), base);
}

std::string report_to_json(const FitReport& r) {
  const ElboTerms& t = r.final_terms;
  Json terms;
  terms["cluster"] = t.cluster;
  terms["omega_prior"] = t.omega_prior;
  terms["local_theta_prior"] = t.local_theta_prior;
  terms["global_theta_prior"] = t.global_theta_prior;
  terms["indicator"] = t.indicator;
  terms["local_assign"] = t.local_assign;
  terms["global_assign"] = t.global_assign;
  terms["emission"] = t.emission;
  terms["entropy_cluster"] = t.entropy_cluster;
  terms["entropy_omega"] = t.entropy_omega;
  terms["entropy_local_theta"] = t.entropy_local_theta;
  terms["entropy_global_theta"] = t.entropy_global_theta;
  terms["entropy_indicator"] = t.entropy_indicator;
  terms["entropy_local_assign"] = t.entropy_local_assign;
  terms["entropy_global_assign"] = t.entropy_global_assign;
  Json out;
  out["format"] = "mgctm-report";
  out["version"] = kFormatVersion;
  out["iterations_run"] = r.iterations_run;
  out["converged"] = r.converged;
  out["init_search_elbos"] = r.init_search_elbos;
  out["elbo_trace"] = r.elbo_trace;
  out["final_terms"] = std::move(terms);
  return out.dump(1) + "\n";
}

std::string lda_to_json(const SavedLda& s) {
  const LdaModel& m = s.model;
  Json opts;
  opts["num_topics"] = s.options.num_topics;
  opts["alpha"] = s.options.alpha;
  opts["eta"] = s.options.eta;
  opts["max_iters"] = s.options.max_iters;
  opts["tol"] = s.options.tol;
  opts["e_step_iters"] = s.options.e_step_iters;
  opts["e_step_tol"] = s.options.e_step_tol;
  opts["seed"] = s.options.seed;
  Json out;
  out["format"] = "mgctm-lda-model";
  out["version"] = kFormatVersion;
  out["options"] = std::move(opts);
  out["topics"] = rows_json(m.topics.data.data(), m.topics.rows, m.topics.cols);
  out["topic_lambda"] = rows_json(m.topic_lambda.data.data(), m.topic_lambda.rows, m.topic_lambda.cols);
  out["doc_theta"] = rows_json(m.doc_theta.data.data(), m.doc_theta.rows, m.doc_theta.cols);
  out["elbo_trace"] = m.elbo_trace;
  out["iterations_run"] = m.iterations_run;
  out["converged"] = m.converged;
  return out.dump(1) + "\n";
}

SavedLda lda_from_json(const std::string& text) {
  const Json j = parse_json(text);
  check_header(j, "mgctm-lda-model");
  reject_unknown(j,
                 {"format", "version", "options", "topics", "topic_lambda", "doc_theta",
                  "elbo_trace", "iterations_run", "converged"},
                 "LDA model");
  SavedLda s;
  const Json& o = field(j, "options", "LDA model");
  reject_unknown(o, {"num_topics", "alpha", "eta", "max_iters", "tol", "e_step_iters", "e_step_tol", "seed"},
                 "options");
  auto set = [&](const char* key, auto& dst) {
    if (o.contains(key)) dst = as<std::decay_t<decltype(dst)>>(o[key], std::string("options.") + key);
  };
  set("num_topics", s.options.num_topics);
  set("alpha", s.options.alpha);
  set("eta", s.options.eta);
  set("max_iters", s.options.max_iters);
  set("tol", s.options.tol);
  set("e_step_iters", s.options.e_step_iters);
  set("e_step_tol", s.options.e_step_tol);
  set("seed", s.options.seed);
  s.options.validate();

  auto matrix = [&](const char* key, std::size_t cols_hint) {
    const Json& rows = field(j, key, "LDA model");
    if (!rows.is_array() || rows.empty()) throw DimensionError(std::string(key) + ": expected rows");
    const std::size_t cols = cols_hint ? cols_hint : rows[0].size();
    DenseMatrix m(rows.size(), cols);
    m.data = flat_rows(rows, rows.size(), cols, key);
    return m;
  };
  const std::size_t T = static_cast<std::size_t>(s.options.num_topics);
  s.model.alpha = s.options.alpha;
  s.model.eta = s.options.eta;
  s.model.topics = matrix("topics", 0);
  s.model.topic_lambda = matrix("topic_lambda", s.model.topics.cols);
  s.model.doc_theta = matrix("doc_theta", T);
  if (s.model.topics.rows != T) throw DimensionError("topics: expected num_topics rows");
  if (j.contains("elbo_trace")) s.model.elbo_trace = as<std::vector<double>>(j["elbo_trace"], "elbo_trace");
  if (j.contains("iterations_run")) s.model.iterations_run = as<int>(j["iterations_run"], "iterations_run");
  if (j.contains("converged")) s.model.converged = as<bool>(j["converged"], "converged");
  s.model.validate(1e-6);
  return s;
}

std::string hidden_to_jsonl(const HiddenAssignments& hidden) {
  std::string out;
  for (std::size_t d = 0; d < hidden.docs.size(); ++d) {
    const DocAssignment& a = hidden.docs[d];
    Json tokens = Json::array();
    for (const auto& t : a.tokens) {
      tokens.push_back(Json::array({t.word + 1, t.local ? 1 : 0, t.topic}));
    }
    Json line;
    line["doc"] = d + 1;
    line["cluster"] = a.cluster;
    line["omega"] = a.omega;
    line["tokens"] = std::move(tokens);
    out += line.dump();
    out += '\n';
  }
  return out;
}

HiddenAssignments hidden_from_jsonl(const std::string& text) {
  HiddenAssignments out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
      reject_unknown(j, {"doc", "cluster", "omega", "tokens"}, "hidden assignment");
      if (j.at("doc").get<std::size_t>() != out.docs.size() + 1) {
        throw ParseError("documents out of order", line_no);
      }
      DocAssignment a;
      a.cluster = j.at("cluster").get<int>();
      a.omega = j.at("omega").get<double>();
      for (const auto& t : j.at("tokens")) {
        if (!t.is_array() || t.size() != 3) throw ParseError("token must be [word, local, topic]", line_no);
        const auto word = t[0].get<std::uint64_t>();
        if (word < 1) throw ParseError("word ids are 1-based", line_no);
        a.tokens.push_back({static_cast<WordId>(word - 1), t[1].get<int>() != 0, t[2].get<int>()});
      }
      out.docs.push_back(std::move(a));
    } catch (const Json::exception& e) {
      throw ParseError(std::string("bad hidden-assignment record: ") + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace mgctm
