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

#include "mgctm/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "mgctm/error.hpp"
#include "mgctm/io.hpp"
#include "mgctm/log.hpp"

namespace mgctm {

Document::Document(std::vector<WordCount> entries, std::optional<int> label)
    : entries_(std::move(entries)), label_(label) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].count == 0) throw DomainError("document entry with zero count");
    if (i > 0 && entries_[i].word <= entries_[i - 1].word) {
      throw DomainError("document word ids must be strictly increasing");
    }
    length_ += entries_[i].count;
  }
}

Document Document::from_tokens(const std::vector<WordId>& tokens,
                               std::optional<int> label) {
  std::map<WordId, std::uint32_t> counts;
  for (WordId w : tokens) ++counts[w];
  std::vector<WordCount> entries;
  entries.reserve(counts.size());
  for (const auto& [w, c] : counts) entries.push_back({w, c});
  return Document(std::move(entries), label);
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw ParseError("empty vocabulary token", i + 1);
    if (!index_.emplace(tokens_[i], static_cast<WordId>(i)).second) {
      throw ParseError("duplicate vocabulary token '" + tokens_[i] + "'", i + 1);
    }
  }
}

Vocabulary Vocabulary::synthetic(std::size_t size) {
  std::vector<std::string> tokens;
  tokens.reserve(size);
  for (std::size_t i = 0; i < size; ++i) tokens.push_back("w" + std::to_string(i + 1));
  return Vocabulary(std::move(tokens));
}

std::optional<WordId> Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Corpus::Corpus(std::vector<Document> docs, std::size_t vocab_size)
    : docs_(std::move(docs)), vocab_size_(vocab_size) {
  for (const auto& doc : docs_) {
    for (const auto& e : doc.entries()) {
      if (e.word >= vocab_size_) {
        throw RangeError("word id " + std::to_string(e.word) +
                             " outside vocabulary of size " + std::to_string(vocab_size_),
                         0);
      }
    }
  }
}

std::size_t Corpus::total_tokens() const noexcept {
  std::size_t n = 0;
  for (const auto& d : docs_) n += d.length();
  return n;
}

bool Corpus::has_labels() const noexcept {
  return !docs_.empty() &&
         std::all_of(docs_.begin(), docs_.end(),
                     [](const Document& d) { return d.label().has_value(); });
}

std::vector<int> Corpus::labels() const {
  std::vector<int> out;
  out.reserve(docs_.size());
  for (const auto& d : docs_) {
    if (!d.label()) throw ConfigError("corpus has unlabeled documents");
    out.push_back(*d.label());
  }
  return out;
}

namespace {

// Line-oriented integer tokenizer that keeps track of line numbers.
class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Next non-blank line split into whitespace-separated fields.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      fields.clear();
      std::size_t i = 0;
      while (i < line_.size()) {
        while (i < line_.size() && std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
        std::size_t j = i;
        while (j < line_.size() && !std::isspace(static_cast<unsigned char>(line_[j]))) ++j;
        if (j > i) fields.emplace_back(line_.data() + i, j - i);
        i = j;
      }
      if (!fields.empty()) return true;
    }
    return false;
  }

  std::size_t line() const noexcept { return line_no_; }

 private:
  std::istringstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

long long parse_int(std::string_view field, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("expected integer, got '" + std::string(field) + "'", line);
  }
  return v;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

}  // namespace

std::vector<int> parse_labels(const std::string& text) {
  std::vector<int> labels;
  const auto lines = split_lines(text);
  labels.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view s = lines[i];
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    const long long v = parse_int(s, i + 1);
    if (v < 0 || v > std::numeric_limits<int>::max()) {
      throw RangeError("label must be a non-negative integer", i + 1);
    }
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

Vocabulary parse_vocab(const std::string& text) {
  auto tokens = split_lines(text);
  for (auto& t : tokens) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  }
  return Vocabulary(std::move(tokens));
}

LoadedCorpus parse_bow(const std::string& bow_text,
                       const std::optional<std::string>& vocab_text,
                       const std::optional<std::string>& labels_text) {
  LineReader reader(bow_text);
  std::vector<std::string_view> f;
  if (!reader.next(f)) throw ParseError("missing header line", 1);
  if (f.size() != 3) throw ParseError("header must be 'D V NNZ'", reader.line());
  const long long num_docs = parse_int(f[0], reader.line());
  const long long vocab_size = parse_int(f[1], reader.line());
  const long long nnz = parse_int(f[2], reader.line());
  if (num_docs < 0 || vocab_size < 0 || nnz < 0) {
    throw ParseError("negative header field", reader.line());
  }
  if (num_docs == 0) throw ParseError("empty corpus", reader.line());

  std::vector<std::vector<WordCount>> entries(static_cast<std::size_t>(num_docs));
  long long prev_doc = 0, prev_word = 0;
  for (long long n = 0; n < nnz; ++n) {
    if (!reader.next(f)) {
      throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                           std::to_string(n),
                       reader.line() + 1);
    }
    const std::size_t line = reader.line();
    if (f.size() != 3) throw ParseError("entry must be 'doc_id word_id count'", line);
    const long long d = parse_int(f[0], line);
    const long long w = parse_int(f[1], line);
    const long long c = parse_int(f[2], line);
    if (d < 1 || d > num_docs) throw RangeError("doc id out of range", line);
    if (w < 1 || w > vocab_size) throw RangeError("word id out of vocabulary range", line);
    if (c < 1 || c > std::numeric_limits<std::uint32_t>::max()) {
      throw ParseError("count must be a positive integer", line);
    }
    if (d < prev_doc || (d == prev_doc && w <= prev_word)) {
      throw ParseError("entries must be sorted by doc id then word id", line);
    }
    prev_doc = d;
    prev_word = w;
    entries[d - 1].push_back({static_cast<WordId>(w - 1), static_cast<std::uint32_t>(c)});
  }
  if (reader.next(f)) throw ParseError("more entries than declared NNZ", reader.line());

  LoadedCorpus out;
  if (vocab_text) {
    out.vocabulary = parse_vocab(*vocab_text);
    if (static_cast<long long>(out.vocabulary.size()) != vocab_size) {
      throw ParseError("vocabulary has " + std::to_string(out.vocabulary.size()) +
                           " tokens but header declares V=" + std::to_string(vocab_size),
                       0);
    }
  } else {
    out.vocabulary = Vocabulary::synthetic(static_cast<std::size_t>(vocab_size));
  }

  std::vector<int> labels;
  if (labels_text) {
    labels = parse_labels(*labels_text);
    if (static_cast<long long>(labels.size()) != num_docs) {
      throw ParseError("labels file has " + std::to_string(labels.size()) +
                           " lines but corpus declares D=" + std::to_string(num_docs),
                       0);
    }
  }

  std::vector<Document> docs;
  docs.reserve(entries.size());
  out.report.declared_docs = static_cast<std::size_t>(num_docs);
  for (std::size_t d = 0; d < entries.size(); ++d) {
    if (entries[d].empty()) {
      out.report.dropped_empty_docs.push_back(d + 1);
      continue;
    }
    std::optional<int> label;
    if (labels_text) label = labels[d];
    docs.emplace_back(std::move(entries[d]), label);
  }
  if (!out.report.dropped_empty_docs.empty()) {
    log::warn("dropped " + std::to_string(out.report.dropped_empty_docs.size()) +
              " empty document(s)");
  }
  if (docs.empty()) throw ParseError("empty corpus: every document is empty", 0);
  out.corpus = Corpus(std::move(docs), static_cast<std::size_t>(vocab_size));
  return out;
}

LoadedCorpus load_bow(const std::filesystem::path& bow_path,
                      const std::optional<std::filesystem::path>& vocab_path,
                      const std::optional<std::filesystem::path>& labels_path) {
  std::optional<std::string> vocab_text, labels_text;
  if (vocab_path) vocab_text = io::read_file(*vocab_path);
  if (labels_path) labels_text = io::read_file(*labels_path);
  return parse_bow(io::read_file(bow_path), vocab_text, labels_text);
}

std::string format_bow(const Corpus& corpus) {
  std::size_t nnz = 0;
  for (const auto& d : corpus.docs()) nnz += d.num_entries();
  std::ostringstream out;
  out << corpus.num_docs() << ' ' << corpus.vocab_size() << ' ' << nnz << '\n';
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    for (const auto& e : corpus.doc(d).entries()) {
      out << d + 1 << ' ' << e.word + 1 << ' ' << e.count << '\n';
    }
  }
  return out.str();
}

std::string format_vocab(const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out += '\n';
  }
  return out;
}

std::string format_labels(const std::vector<int>& labels) {
  std::string out;
  for (int l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

DenseMatrix tfidf_vectors(const Corpus& corpus) {
  const std::size_t D = corpus.num_docs();
  const std::size_t V = corpus.vocab_size();
  if (D == 0) throw DomainError("tfidf_vectors: empty corpus");
  std::vector<std::size_t> df(V, 0);
  for (const auto& doc : corpus.docs()) {
    for (const auto& e : doc.entries()) ++df[e.word];
  }
  std::vector<double> idf(V, 0.0);
  for (std::size_t v = 0; v < V; ++v) {
    if (df[v] > 0) idf[v] = std::log(static_cast<double>(D) / static_cast<double>(df[v]));
  }
  DenseMatrix m(D, V);
  std::size_t zero_rows = 0;
  for (std::size_t d = 0; d < D; ++d) {
    const auto& doc = corpus.doc(d);
    const double inv_len = 1.0 / static_cast<double>(doc.length());
    bool any = false;
    for (const auto& e : doc.entries()) {
      const double w = e.count * inv_len * idf[e.word];
      m(d, e.word) = w;
      any = any || w > 0.0;
    }
    if (!any) ++zero_rows;
  }
  if (zero_rows > 0) {
    log::warn("tf-idf: " + std::to_string(zero_rows) + " document(s) have all-zero weight");
  }
  return m;
}

}  // namespace mgctm
