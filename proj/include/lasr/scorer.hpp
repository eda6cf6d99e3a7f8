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

#include <string>
#include <vector>

#include "json.hpp"
#include "lasr/model.hpp"
#include "lasr/tape.hpp"

namespace lasr::decode {

// Recurrent stack followed by a dense layer, producing per-frame phoneme
// posteriors scored with the alignment-marginal criterion. Default shape is
// the 5x700 production scorer; desk runs use smaller values.
struct ScorerConfig {
  int input_dim = 240;
  int num_phonemes = 0;  // blank is num_phonemes
  int layers = 5;
  int hidden = 700;

  void validate() const;
};

class PhonemeCtcScorer {
 public:
  PhonemeCtcScorer(ScorerConfig cfg, std::uint64_t init_seed);
  PhonemeCtcScorer(ScorerConfig cfg, model::ParamStore params);

  const ScorerConfig& config() const { return cfg_; }
  model::ParamStore& params() { return params_; }
  const model::ParamStore& params() const { return params_; }

  model::BoundParams bind(ad::Tape& tape) const;

  // U x (num_phonemes + 1) logits, blank last.
  ad::NodeId frame_logits(ad::Tape& tape, const model::BoundParams& p,
                          const ad::Array& feats) const;

  // Log-likelihood of the phoneme sequence given the features (negated
  // alignment-marginal loss).
  double score(const ad::Array& feats, const std::vector<int>& phonemes) const;

  int blank_id() const { return cfg_.num_phonemes; }

 private:
  void init_params(std::uint64_t seed);

  ScorerConfig cfg_;
  model::ParamStore params_;
};

void save_scorer(const std::string& path, const PhonemeCtcScorer& scorer,
                 const nlohmann::json* extra_meta = nullptr);
PhonemeCtcScorer load_scorer(const std::string& path);

}  // namespace lasr::decode
