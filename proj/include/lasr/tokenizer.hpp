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
#include <utility>
#include <vector>

namespace lasr::tokenizer {

// Token ids for a decoder target sequence: <sos> payload... <eos>.
using TokenSequence = std::vector<int>;

// Unigram subword inventory. Ids 0..2 are the specials, pieces follow.
// Word boundaries are carried by a reserved separator character that
// replaces spaces during normalization, so decoding restores them.
struct SubwordModel {
  static constexpr int kSos = 0;
  static constexpr int kEos = 1;
  static constexpr int kUnk = 2;
  static constexpr int kNumSpecials = 3;

  std::vector<std::string> pieces;      // indexed by id, includes specials
  std::vector<double> log_probs;        // sentinel -99 for specials
  std::unordered_map<std::string, int> piece_ids;
  int max_piece_len = 1;                // in code points

  int vocab_size() const { return static_cast<int>(pieces.size()); }
  bool is_special(int id) const { return id < kNumSpecials; }

  // Builds a hand-specified model (tests, tiny experiments). Pairs are
  // (piece string, log probability); single characters need not be complete.
  static SubwordModel from_pieces(
      const std::vector<std::pair<std::string, double>>& entries);

  void rebuild_index();
};

struct UnigramTrainOptions {
  int vocab_size = 200;           // total id space, specials included
  int max_piece_len = 6;          // seed substrings up to this many chars
  int min_piece_count = 2;        // frequency threshold for seed substrings
  int em_iters_per_round = 2;
  double prune_fraction = 0.2;    // share of multi-char pieces cut per round
  int max_seed_pieces = 20000;
};

// (vocab size during the iteration, corpus negative log-likelihood).
using NllTrace = std::vector<std::pair<int, double>>;

SubwordModel train_unigram(const std::vector<std::string>& corpus,
                           const UnigramTrainOptions& opts,
                           NllTrace* nll_trace = nullptr);

// Viterbi (max log-prob) segmentation; characters unseen in training map to
// <unk>, so encoding always succeeds.
std::vector<int> encode(const SubwordModel& model, const std::string& text);

// Log probability of the encode() segmentation (sum of piece log-probs).
double encode_score(const SubwordModel& model, const std::string& text);

std::string decode(const SubwordModel& model, const std::vector<int>& ids);

TokenSequence add_sentinels(const std::vector<int>& payload);
std::vector<int> strip_sentinels(const TokenSequence& target);

void save_model(const SubwordModel& model, const std::string& path);
SubwordModel load_model(const std::string& path);

// The reserved word-boundary character (in normalized text).
extern const std::string kBoundary;

// Trims, collapses runs of whitespace, and swaps spaces for the boundary
// character.
std::string normalize(const std::string& text);

// Splits a UTF-8 string into code points.
std::vector<std::string> utf8_chars(const std::string& text);

// Pronunciation lexicon for the phoneme rescorer. Phoneme ids are dense from
// 0; the CTC blank is implicitly num_phonemes() and never appears in entries.
struct Lexicon {
  std::map<std::string, std::vector<int>> entries;      // word -> phoneme ids
  std::vector<std::string> phonemes;                    // id -> symbol

  int num_phonemes() const { return static_cast<int>(phonemes.size()); }
  int blank_id() const { return num_phonemes(); }
};

Lexicon make_lexicon(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        word_prons);

// Concatenated per-word phoneme ids; a word missing from the lexicon is an
// error that names the word.
std::vector<int> to_phonemes(const Lexicon& lex, const std::string& text);

void save_lexicon(const Lexicon& lex, const std::string& path);
Lexicon load_lexicon(const std::string& path);

std::vector<std::string> split_words(const std::string& text);

}  // namespace lasr::tokenizer
