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

#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace lasr::lm {

// Backoff n-gram model with ARPA semantics: conditional log10 probabilities
// for seen n-grams plus backoff weights per seen context. Open vocabulary:
// unknown words score through <unk>.
struct NGramLM {
  struct Entry {
    double logp = 0.0;      // log10
    double bow = 0.0;       // log10 backoff weight
    bool has_bow = false;
  };

  int order = 0;
  std::vector<std::string> vocab;                 // id -> word
  std::unordered_map<std::string, int> word_ids;  // word -> id
  // tables[n-1]: n-gram (as id sequence) -> entry.
  std::vector<std::map<std::vector<int>, Entry>> tables;

  int id_of(const std::string& word) const;  // <unk> for unknown words
  bool has_word(const std::string& word) const {
    return word_ids.count(word) > 0;
  }

  // log10 P(word id | context ids), resolving through backoff.
  double cond_log10(const std::vector<int>& context, int word) const;
};

struct NGramTrainOptions {
  int order = 4;
  double discount = 0.75;  // absolute discount in [0, 1)
};

// Interpolated absolute discounting with uniform base distribution; for every
// context the conditional distribution over vocab + </s> + <unk> sums to one.
NGramLM ngram_train(const std::vector<std::string>& sentences,
                    const NGramTrainOptions& opts);

// Total natural-log probability of the word sequence, including the
// end-of-sentence transition.
double ngram_score(const NGramLM& lm, const std::vector<std::string>& words);

void save_arpa(const NGramLM& lm, const std::string& path);
NGramLM load_arpa(const std::string& path);

extern const std::string kSentStart;
extern const std::string kSentEnd;
extern const std::string kUnkWord;

}  // namespace lasr::lm
