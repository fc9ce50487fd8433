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

#pragma once

// JSON documents for models, configs, LDA models, fit reports and the
// sampler's hidden assignments. Every document carries "format" and
// "version"; readers reject unknown formats, newer versions and unknown
// keys. Doubles are written with 17 significant digits so values
// round-trip exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "mgctm/baselines.hpp"
#include "mgctm/model.hpp"

namespace mgctm {

inline constexpr int kFormatVersion = 1;

struct SavedModel {
  HyperConfig config;
  ModelParams params;
  // Training documents' predicted clusters; may be empty.
  std::vector<int> doc_clusters;
};

// {"format": "mgctm-model", "version": 1, "config": {...},
//  "params": {...}, "doc_clusters": [...]}
std::string model_to_json(const SavedModel& model);
// Throws ParseError on malformed JSON or a wrong format/version,
// ConfigError on a bad config section, DomainError/DimensionError on
// parameters that break their invariants.
SavedModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const SavedModel& model);
SavedModel load_model(const std::filesystem::path& path);

// {"format": "mgctm-config", "version": 1, "config": {...}}. Missing keys
// keep the values in `base`. A model document is accepted too, in which
// case its config section is used.
std::string config_to_json(const HyperConfig& config);
HyperConfig config_from_json(const std::string& text, const HyperConfig& base = {});

std::string init_scheme_name(InitScheme scheme);
InitScheme parse_init_scheme(const std::string& name);  // ConfigError
std::string prior_update_name(PriorUpdate mode);
PriorUpdate parse_prior_update(const std::string& name);  // ConfigError

// {"format": "mgctm-report", ...}: trace, iteration count, convergence
// flag, initialization-search bounds and the final per-term breakdown.
// Wall time is left out so identical runs give identical files.
std::string report_to_json(const FitReport& report);

struct SavedLda {
  LdaOptions options;
  LdaModel model;
};

// {"format": "mgctm-lda-model", "version": 1, "options": {...},
//  "topics": [[...]], "topic_lambda": [[...]], "doc_theta": [[...]], ...}
std::string lda_to_json(const SavedLda& lda);
SavedLda lda_from_json(const std::string& text);

// One JSON object per line, one line per document:
// {"doc": d, "cluster": c, "omega": w, "tokens": [[word, local, topic], ...]}
// with 1-based doc and word ids (matching the bag-of-words files), local
// = 1 for the local pathway, and topic the 0-based topic within the
// pathway (within the document's cluster for local words).
std::string hidden_to_jsonl(const HiddenAssignments& hidden);
HiddenAssignments hidden_from_jsonl(const std::string& text);

}  // namespace mgctm
