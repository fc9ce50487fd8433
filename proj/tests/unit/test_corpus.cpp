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

#include <cmath>
#include <random>

#include "doctest.h"
#include "mgctm/corpus.hpp"
#include "mgctm/error.hpp"

using namespace mgctm;

TEST_CASE("bow round trip") {
  const std::string text = "3 5 5\n1 1 2\n1 4 1\n2 2 7\n3 3 1\n3 5 3\n";
  const auto loaded = parse_bow(text, std::string("a\nb\nc\nd\ne\n"), std::string("0\n1\n0\n"));
  CHECK(loaded.corpus.num_docs() == 3);
  CHECK(loaded.corpus.vocab_size() == 5);
  CHECK(loaded.corpus.total_tokens() == 14);
  CHECK(loaded.corpus.doc(1).entries()[0] == WordCount{1, 7});
  CHECK(loaded.corpus.labels() == std::vector<int>{0, 1, 0});
  CHECK(loaded.vocabulary.token(3) == "d");
  CHECK(format_bow(loaded.corpus) == text);
  CHECK(parse_bow(format_bow(loaded.corpus)).corpus.docs()[2].entries() ==
        loaded.corpus.docs()[2].entries());
}

TEST_CASE("random corpora survive format and parse") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<WordId> word(0, 29);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Document> docs;
    for (int d = 0; d < 1 + rep; ++d) {
      std::vector<WordId> tokens;
      for (int i = 0; i < 1 + (d * 7) % 13; ++i) tokens.push_back(word(rng));
      docs.push_back(Document::from_tokens(tokens));
    }
    const Corpus c(docs, 30);
    CHECK(parse_bow(format_bow(c)).corpus == c);
  }
}

TEST_CASE("bow parse errors") {
  CHECK_THROWS_AS(parse_bow(""), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("0 5 0\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 3 1\n"), RangeError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n2 1 1\n"), RangeError);
  CHECK_THROWS_AS(parse_bow("1 2 2\n1 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 1 1\n1 2 1\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 2\n1 2 1\n1 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 x 1\n"), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 1 1\n", std::string("a\n")), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 1 1\n", std::string("a\na\n")), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 1 1\n", {}, std::string("0\n1\n")), ParseError);
  CHECK_THROWS_AS(parse_bow("1 2 1\n1 1 1\n", {}, std::string("-1\n")), RangeError);
}

TEST_CASE("empty documents are dropped with their labels") {
  const auto loaded = parse_bow("4 3 2\n1 1 1\n3 2 2\n", {}, std::string("5\n6\n7\n8\n"));
  CHECK(loaded.corpus.num_docs() == 2);
  CHECK(loaded.corpus.labels() == std::vector<int>{5, 7});
  CHECK(loaded.report.declared_docs == 4);
  CHECK(loaded.report.dropped_empty_docs == std::vector<std::size_t>{2, 4});
  CHECK_THROWS_AS(parse_bow("2 3 0\n"), ParseError);
}

TEST_CASE("documents") {
  const auto d = Document::from_tokens({4, 1, 4, 4, 0}, 3);
  CHECK(d.length() == 5);
  CHECK(d.entries() == std::vector<WordCount>{{0, 1}, {1, 1}, {4, 3}});
  CHECK(d.label() == 3);
  CHECK_THROWS_AS(Document({{2, 1}, {1, 1}}), DomainError);
  CHECK_THROWS_AS(Document({{1, 0}}), DomainError);
  CHECK_THROWS_AS(Corpus({Document::from_tokens({5})}, 5), RangeError);
  const Corpus unlabeled({Document::from_tokens({0})}, 1);
  CHECK(!unlabeled.has_labels());
  CHECK_THROWS_AS(unlabeled.labels(), ConfigError);
}

TEST_CASE("vocabulary") {
  const auto v = parse_vocab("apple  \nbanana\r\ncherry\n\n");
  CHECK(v.size() == 3);
  CHECK(v.token(0) == "apple");
  CHECK(v.find("banana") == WordId{1});
  CHECK(!v.find("durian"));
  CHECK(format_vocab(v) == "apple\nbanana\ncherry\n");
  CHECK(Vocabulary::synthetic(3).size() == 3);
}

TEST_CASE("labels") {
  const std::vector<int> l{0, 3, 1, 12};
  CHECK(parse_labels(format_labels(l)) == l);
  CHECK(parse_labels(" 2 \n1\n") == std::vector<int>{2, 1});
  CHECK_THROWS_AS(parse_labels("1\nfoo\n"), ParseError);
}

TEST_CASE("tfidf weights") {
  const Corpus c({Document::from_tokens({0, 0, 1}), Document::from_tokens({1, 2}),
                  Document::from_tokens({1})},
                 4);
  const auto m = tfidf_vectors(c);
  CHECK(m.rows == 3);
  CHECK(m.cols == 4);
  CHECK(m(0, 0) == doctest::Approx(2.0 / 3.0 * std::log(3.0)));
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 2) == doctest::Approx(0.5 * std::log(3.0)));
  CHECK(m(2, 1) == 0.0);
  CHECK(m(2, 3) == 0.0);
}
