// Copyright 2026 The lasr Authors
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
#include <filesystem>
#include <set>

#include "doctest.h"
#include "lasr/io.hpp"
#include "lasr/tokenizer.hpp"
#include "oracles.hpp"

using namespace lasr::tokenizer;

TEST_SUITE_BEGIN("tokenizer");

TEST_CASE("training on repeated 'abab' learns a piece covering 'ab'") {
  UnigramTrainOptions opts;
  opts.vocab_size = 6;  // 3 specials + 'a' + 'b' + one learned piece
  const SubwordModel m = train_unigram({"abab", "abab"}, opts);
  CHECK(m.vocab_size() <= 6);
  CHECK(m.piece_ids.count("a") == 1);
  CHECK(m.piece_ids.count("b") == 1);
  bool has_ab_piece = false;
  for (const auto& [piece, id] : m.piece_ids) {
    if (utf8_chars(piece).size() > 1 && piece.find("ab") != std::string::npos)
      has_ab_piece = true;
  }
  CHECK(has_ab_piece);
}

TEST_CASE("a single-character corpus yields a character-only model") {
  UnigramTrainOptions opts;
  opts.vocab_size = 1 + SubwordModel::kNumSpecials;  // chars + specials
  const SubwordModel m = train_unigram({"a"}, opts);
  CHECK(m.vocab_size() == 4);
  CHECK(m.piece_ids.count("a") == 1);
}

TEST_CASE("vocab too small for the character set is an error") {
  UnigramTrainOptions opts;
  opts.vocab_size = 4;  // needs 3 specials + 3 chars
  CHECK_THROWS_AS(train_unigram({"abc"}, opts), lasr::Error);
}

TEST_CASE("piece log-probabilities are normalized (logsumexp zero)") {
  UnigramTrainOptions opts;
  opts.vocab_size = 18;
  const SubwordModel m = train_unigram({"red shoe", "red bag", "blue shoe"},
                                       opts);
  double sum = 0.0;
  for (int id = SubwordModel::kNumSpecials; id < m.vocab_size(); ++id)
    sum += std::exp(m.log_probs[static_cast<std::size_t>(id)]);
  CHECK(std::fabs(std::log(sum)) < 1e-9);
}

TEST_CASE("EM never increases training NLL while the vocab is fixed") {
  UnigramTrainOptions opts;
  opts.vocab_size = 16;
  opts.em_iters_per_round = 4;
  NllTrace trace;
  train_unigram({"red shoe", "red bag", "blue shoe", "blue bag", "red shoe"},
                opts, &trace);
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].first != trace[i - 1].first) continue;  // vocab changed
    CHECK(trace[i].second <= trace[i - 1].second + 1e-8);
  }
}

TEST_CASE("viterbi picks the maximum-probability segmentation") {
  const SubwordModel m = SubwordModel::from_pieces({
      {"a", std::log(0.25)},
      {"b", std::log(0.25)},
      {"ab", std::log(0.5)},
  });
  // Five segmentations of "abab"; ab+ab scores ln(0.25) and wins.
  const auto ids = encode(m, "abab");
  REQUIRE(ids.size() == 2);
  CHECK(m.pieces[static_cast<std::size_t>(ids[0])] == "ab");
  CHECK(m.pieces[static_cast<std::size_t>(ids[1])] == "ab");
  CHECK(encode_score(m, "abab") == doctest::Approx(std::log(0.25)));
}

TEST_CASE("single-character text encodes to its character piece") {
  const SubwordModel m = SubwordModel::from_pieces({{"a", std::log(0.5)}});
  const auto ids = encode(m, "a");
  REQUIRE(ids.size() == 1);
  CHECK(m.pieces[static_cast<std::size_t>(ids[0])] == "a");
}

TEST_CASE("encode matches brute-force segmentation search on short strings") {
  UnigramTrainOptions opts;
  opts.vocab_size = 14;
  const SubwordModel m =
      train_unigram({"abc abd", "abc abc", "bdc", "cab abc"}, opts);
  std::vector<std::pair<std::string, double>> inventory;
  for (int id = SubwordModel::kNumSpecials; id < m.vocab_size(); ++id)
    inventory.emplace_back(m.pieces[static_cast<std::size_t>(id)],
                           m.log_probs[static_cast<std::size_t>(id)]);

  lasr::util::Rng rng(31);
  const std::string alphabet = "abcd";
  for (int trial = 0; trial < 40; ++trial) {
    const int len = 1 + rng.uniform_int(12);
    std::string text;
    for (int i = 0; i < len; ++i) {
      if (i > 0 && i + 1 < len && rng.uniform() < 0.15) text += ' ';
      text += alphabet[static_cast<std::size_t>(rng.uniform_int(4))];
    }
    const std::string norm = normalize(text);
    if (norm.empty()) continue;
    const double oracle = oracles::best_segmentation_score(
        utf8_chars(norm), inventory);
    if (oracle == -std::numeric_limits<double>::infinity()) continue;
    CHECK(encode_score(m, text) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("decode inverts encode on alphabet-closed text") {
  UnigramTrainOptions opts;
  opts.vocab_size = 20;
  const SubwordModel m =
      train_unigram({"red shoe", "blue bag", "red bag desk"}, opts);
  lasr::util::Rng rng(7);
  const std::vector<std::string> words = {"red", "blue", "shoe", "bag",
                                          "desk"};
  for (int trial = 0; trial < 30; ++trial) {
    std::string text;
    const int n = 1 + rng.uniform_int(4);
    for (int i = 0; i < n; ++i) {
      if (i) text += ' ';
      text += words[static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(words.size())))];
    }
    CHECK(decode(m, encode(m, text)) == text);
  }
}

TEST_CASE("decode strips sentinels and restores spaces") {
  const SubwordModel m = SubwordModel::from_pieces({
      {"ab", std::log(0.5)},
      {"a", std::log(0.5)},
  });
  const int ab = m.piece_ids.at("ab");
  const int a = m.piece_ids.at("a");
  CHECK(decode(m, {ab, ab}) == "abab");
  CHECK(decode(m, {SubwordModel::kSos, a, SubwordModel::kEos}) == "a");
  CHECK(decode(m, {}) == "");
  CHECK_THROWS_AS(decode(m, {99}), lasr::Error);
}

TEST_CASE("unseen characters fall back to <unk> so encode never fails") {
  const SubwordModel m = SubwordModel::from_pieces({{"a", std::log(1.0)}});
  const auto ids = encode(m, "axa");
  REQUIRE(ids.size() == 3);
  CHECK(ids[1] == SubwordModel::kUnk);
}

TEST_CASE("subword model TSV round-trips bit-exactly") {
  UnigramTrainOptions opts;
  opts.vocab_size = 16;
  const SubwordModel m = train_unigram({"red shoe", "blue bag"}, opts);
  const auto dir = std::filesystem::temp_directory_path() / "lasr_tok_test";
  std::filesystem::create_directories(dir);
  const std::string p1 = (dir / "m1.tsv").string();
  const std::string p2 = (dir / "m2.tsv").string();
  save_model(m, p1);
  const SubwordModel back = load_model(p1);
  CHECK(back.pieces == m.pieces);
  CHECK(back.log_probs == m.log_probs);
  save_model(back, p2);
  CHECK(lasr::util::read_file(p1) == lasr::util::read_file(p2));
}

TEST_CASE("lexicon lookups concatenate per-word phonemes in order") {
  const Lexicon lex = make_lexicon({{"cat", {"k", "a", "t"}}});
  const auto ids = to_phonemes(lex, "cat cat");
  REQUIRE(ids.size() == 6);
  CHECK(ids[0] == ids[3]);
  CHECK(ids[1] == ids[4]);
  CHECK(ids[2] == ids[5]);
  CHECK(lex.phonemes[static_cast<std::size_t>(ids[0])] == "k");
  CHECK(lex.phonemes[static_cast<std::size_t>(ids[1])] == "a");
  CHECK(lex.phonemes[static_cast<std::size_t>(ids[2])] == "t");

  CHECK(to_phonemes(lex, "").empty());
  CHECK_THROWS_WITH_AS(to_phonemes(lex, "dog"), doctest::Contains("dog"),
                       lasr::Error);
}

TEST_CASE("lexicon TSV round-trips") {
  const Lexicon lex =
      make_lexicon({{"cat", {"k", "a", "t"}}, {"dog", {"d", "o", "g"}}});
  const auto dir = std::filesystem::temp_directory_path() / "lasr_lex_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "lex.tsv").string();
  save_lexicon(lex, path);
  const Lexicon back = load_lexicon(path);
  CHECK(back.phonemes == lex.phonemes);
  CHECK(back.entries == lex.entries);
  CHECK(back.blank_id() == lex.blank_id());
}

TEST_SUITE_END();
