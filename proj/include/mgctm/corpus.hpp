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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgctm/matrix.hpp"

namespace mgctm {

using WordId = std::uint32_t;

struct WordCount {
  WordId word = 0;
  std::uint32_t count = 0;

  friend bool operator==(const WordCount&, const WordCount&) = default;
};

// Bag of words: entries sorted by strictly increasing word id, positive
// counts. Construction validates both.
class Document {
 public:
  Document() = default;
  explicit Document(std::vector<WordCount> entries, std::optional<int> label = {});

  // Builds a document from a token sequence (any order, repeats allowed).
  static Document from_tokens(const std::vector<WordId>& tokens,
                              std::optional<int> label = {});

  const std::vector<WordCount>& entries() const noexcept { return entries_; }
  std::size_t num_entries() const noexcept { return entries_.size(); }
  std::size_t length() const noexcept { return length_; }
  const std::optional<int>& label() const noexcept { return label_; }
  void set_label(std::optional<int> label) { label_ = label; }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::vector<WordCount> entries_;
  std::size_t length_ = 0;
  std::optional<int> label_;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws ParseError on an empty or duplicated token.
  explicit Vocabulary(std::vector<std::string> tokens);

  // Placeholder tokens "w1".."wV", used for synthetic corpora.
  static Vocabulary synthetic(std::size_t size);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(WordId id) const { return tokens_.at(id); }
  std::optional<WordId> find(const std::string& token) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, WordId> index_;
};

// Immutable after construction; every word id is < vocab_size.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Document> docs, std::size_t vocab_size);

  std::size_t num_docs() const noexcept { return docs_.size(); }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  const std::vector<Document>& docs() const noexcept { return docs_; }
  const Document& doc(std::size_t d) const { return docs_.at(d); }
  std::size_t total_tokens() const noexcept;

  bool has_labels() const noexcept;
  // Throws ConfigError when any document is unlabeled.
  std::vector<int> labels() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<Document> docs_;
  std::size_t vocab_size_ = 0;
};

struct LoadReport {
  std::size_t declared_docs = 0;
  std::vector<std::size_t> dropped_empty_docs;  // 1-based ids from the file
};

struct LoadedCorpus {
  Corpus corpus;
  Vocabulary vocabulary;
  LoadReport report;
};

// Reads the sparse "D V NNZ" + "doc word count" format (1-based ids).
// Empty documents are dropped (with their labels) and listed in the report.
LoadedCorpus load_bow(const std::filesystem::path& bow_path,
                      const std::optional<std::filesystem::path>& vocab_path,
                      const std::optional<std::filesystem::path>& labels_path = {});

LoadedCorpus parse_bow(const std::string& bow_text,
                       const std::optional<std::string>& vocab_text = {},
                       const std::optional<std::string>& labels_text = {});

// One token per line, trailing whitespace trimmed.
Vocabulary parse_vocab(const std::string& text);

std::string format_bow(const Corpus& corpus);
std::string format_vocab(const Vocabulary& vocab);
std::string format_labels(const std::vector<int>& labels);
std::vector<int> parse_labels(const std::string& text);

// tf = count / N_d, idf = ln(D / df_v). Warns about all-zero rows.
DenseMatrix tfidf_vectors(const Corpus& corpus);

}  // namespace mgctm
