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

#include <optional>
#include <string>
#include <vector>

#include "lasr/model.hpp"
#include "lasr/scorer.hpp"
#include "lasr/tokenizer.hpp"

namespace lasr::decode {

struct Hypothesis {
  std::vector<int> tokens;  // payload ids, sentinels stripped
  std::string text;
  double las_score = 0.0;
  double lm_score = 0.0;
  double phoneme_ctc_score = 0.0;
  bool complete = false;
  bool lm_scored = false;  // serialization: null until a model scores it
  // False when a word is missing from the lexicon; fusion then ignores the
  // phoneme score (beta = 1 path).
  bool phoneme_scorable = true;
};

struct BeamSearchOptions {
  int beam = 10;
  int max_len = 64;
  // Compare hypotheses by score / length instead of raw score. Off by
  // default; raw accumulated log-probabilities otherwise.
  bool length_normalize = false;
};

// Length-synchronous beam search over the speller. Completed hypotheses are
// the ones that emitted <eos> inside the beam; the pool is returned sorted by
// las_score (best incomplete hypothesis as fallback).
std::vector<Hypothesis> beam_search(const model::LasModel& m,
                                    const ad::Array& feats,
                                    const BeamSearchOptions& opts);

struct FusionWeights {
  double alpha = 1.0;
  double beta = 1.0;
};

double fuse(const Hypothesis& hyp, const FusionWeights& w);

// Stable re-rank of an n-best list by fused score, best first.
void rerank(std::vector<Hypothesis>& nbest, const FusionWeights& w);

struct ValidationUtt {
  std::vector<Hypothesis> nbest;
  std::string ref_text;
};

// Corpus WER of the top-ranked hypotheses under the given weights.
double fusion_corpus_wer(const std::vector<ValidationUtt>& validation,
                         const FusionWeights& w);

// Grid values 0, step, 2*step, ..., 1 scanned along each axis.
std::vector<double> fusion_grid(double grid_step);

// Exhaustive scan of (alpha, beta) in [0,1]^2 at grid_step; minimizes corpus
// WER, ties broken toward larger alpha then larger beta.
FusionWeights grid_search_fusion(const std::vector<ValidationUtt>& validation,
                                 double grid_step = 0.05);

}  // namespace lasr::decode
