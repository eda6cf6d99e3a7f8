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

#include "doctest.h"
#include "lasr/eval.hpp"
#include "lasr/tokenizer.hpp"
#include "oracles.hpp"

using namespace lasr::eval;

namespace {

std::vector<std::string> words(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("one substituted word counts as a substitution, not ins+del") {
  const EditStats s = levenshtein_words(words({"a", "b", "c"}),
                                        words({"a", "x", "c"}));
  CHECK(s.substitutions == 1);
  CHECK(s.deletions == 0);
  CHECK(s.insertions == 0);
  CHECK(s.ref_words == 3);
}

TEST_CASE("an empty hypothesis deletes every reference word") {
  const EditStats s = levenshtein_words({}, words({"a", "b"}));
  CHECK(s.deletions == 2);
  CHECK(s.substitutions == 0);
  CHECK(s.insertions == 0);
}

TEST_CASE("random pairs match brute-force edit enumeration") {
  lasr::util::Rng rng(42);
  const std::vector<std::string> alphabet = {"x", "y", "z"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> hyp, ref;
    const int hn = rng.uniform_int(7);
    const int rn = rng.uniform_int(7);
    for (int i = 0; i < hn; ++i)
      hyp.push_back(alphabet[static_cast<std::size_t>(rng.uniform_int(3))]);
    for (int i = 0; i < rn; ++i)
      ref.push_back(alphabet[static_cast<std::size_t>(rng.uniform_int(3))]);
    const EditStats s = levenshtein_words(hyp, ref);
    CHECK(s.errors() == oracles::edit_distance_brute_force(hyp, ref));
    CHECK(s.substitutions + s.deletions <= s.ref_words);
  }
}

TEST_CASE("edit distance satisfies the triangle inequality on random triples") {
  lasr::util::Rng rng(43);
  const std::vector<std::string> alphabet = {"u", "v", "w"};
  auto sample = [&] {
    std::vector<std::string> s;
    const int n = rng.uniform_int(6);
    for (int i = 0; i < n; ++i)
      s.push_back(alphabet[static_cast<std::size_t>(rng.uniform_int(3))]);
    return s;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = sample(), b = sample(), c = sample();
    const int ab = levenshtein_words(a, b).errors();
    const int bc = levenshtein_words(b, c).errors();
    const int ac = levenshtein_words(a, c).errors();
    CHECK(ac <= ab + bc);
  }
}

TEST_CASE("corpus WER pools errors and words, not per-utterance rates") {
  CHECK(corpus_wer({"a b c", "a b"}, {"a b c", "a b"}) == 0.0);
  CHECK(corpus_wer({"", ""}, {"a b", "c"}) == 100.0);
  // (1 error over 3 words) + (0 over 2) pools to 1/5 = 20%.
  CHECK(corpus_wer({"a x c", "d e"}, {"a b c", "d e"}) ==
        doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("corpus WER is invariant to partitioning") {
  const std::vector<std::string> hyps = {"a b", "c", "d e f", "g"};
  const std::vector<std::string> refs = {"a x", "c", "d f", "h g"};
  const double whole = corpus_wer(hyps, refs);
  EditStats pooled;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    pooled += levenshtein_words(lasr::tokenizer::split_words(hyps[i]),
                                lasr::tokenizer::split_words(refs[i]));
  }
  CHECK(whole == doctest::Approx(wer_percent(pooled)).epsilon(1e-12));
}

TEST_CASE("WER ignores whitespace layout") {
  CHECK(corpus_wer({"  a   b\tc "}, {"a b c"}) == 0.0);
}

TEST_CASE("hypothesis and reference count mismatch is an error") {
  CHECK_THROWS_AS(corpus_wer({"a"}, {"a", "b"}), lasr::Error);
}

TEST_CASE("relative improvement reproduces the published arithmetic") {
  CHECK(relative_improvement(14.87, 9.37) ==
        doctest::Approx(36.9).epsilon(0.01));
  CHECK(relative_improvement(14.87, 11.12) ==
        doctest::Approx(25.2).epsilon(0.01));
  CHECK(relative_improvement(8.0, 8.0) == 0.0);
  CHECK_THROWS_AS(relative_improvement(0.0, 1.0), lasr::Error);
}

TEST_CASE("split reports pool over the union, not the mean of set rates") {
  // clean: 1 error / 4 words, noisy: 3 errors / 2 words.
  std::vector<TaggedRef> refs = {
      {"u0", "a b c d", "clean"},
      {"u1", "e f", "noisy"},
      {"u2", "g", "noisy"},
  };
  std::map<std::string, std::string> hyps = {
      {"u0", "a b c x"},
      {"u1", "q r s"},  // 2 subs + 1 insertion
      {"u2", "g"},
  };
  const Report report = split_report(refs, hyps);
  CHECK(report.per_tag.at("clean").wer == doctest::Approx(25.0));
  CHECK(report.per_tag.at("noisy").wer == doctest::Approx(100.0));
  // Union: 4 errors / 7 words, not the mean of 25 and 100.
  CHECK(report.pooled.wer == doctest::Approx(400.0 / 7.0).epsilon(1e-12));
  CHECK(report.pooled.wer != doctest::Approx(62.5));
  // Pooled lies between the per-set rates.
  CHECK(report.pooled.wer >= report.per_tag.at("clean").wer);
  CHECK(report.pooled.wer <= report.per_tag.at("noisy").wer);
}

TEST_CASE("a clean-only manifest has no noisy section") {
  std::vector<TaggedRef> refs = {{"u0", "a", "clean"}, {"u1", "b", std::nullopt}};
  std::map<std::string, std::string> hyps = {{"u0", "a"}, {"u1", "b"}};
  const Report report = split_report(refs, hyps);
  CHECK(report.per_tag.count("noisy") == 0);
  CHECK(report.per_tag.at("clean").utterances == 2);
}

TEST_CASE("unknown tags are rejected") {
  std::vector<TaggedRef> refs = {{"u0", "a", "weird"}};
  std::map<std::string, std::string> hyps = {{"u0", "a"}};
  CHECK_THROWS_WITH_AS(split_report(refs, hyps), doctest::Contains("weird"),
                       lasr::Error);
}

TEST_SUITE_END();
