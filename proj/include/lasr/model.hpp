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
#include <unordered_map>
#include <utility>
#include <vector>

#include "lasr/array.hpp"
#include "lasr/rng.hpp"
#include "lasr/tape.hpp"

namespace lasr::model {

enum class AttnKind { kContent, kMultihead, kLocation };
enum class Mode { kTrain, kInfer };

std::string attn_kind_name(AttnKind kind);
AttnKind attn_kind_from_name(const std::string& name);

struct ModelConfig {
  int input_dim = 240;  // stacked feature dimension
  int vocab_size = 0;   // subword inventory size, specials included

  // Listener: bidirectional recurrent stack with pairwise time compression
  // after the listed layers (default: after layers 2 and 4 of 5, 4x overall).
  int enc_layers = 5;
  std::vector<int> compress_after = {2, 4};
  int enc_hidden = 256;  // per direction

  // Speller.
  int dec_layers = 2;
  int dec_hidden = 256;

  AttnKind attn_kind = AttnKind::kMultihead;
  int attn_heads = 4;
  int head_size = 128;
  int loc_conv_channels = 8;
  int loc_conv_width = 15;

  double dropout = 0.3;
  double label_smooth = 0.1;
  double joint_lambda = 0.8;    // CE weight in the joint CE+CTC objective
  double mwer_lambda = 0.01;    // CE weight added to the expected-error loss
  int ss_start_epoch = 20;
  double ss_rate = 0.02;        // per epoch
  double ss_max = 0.3;
  int beam = 10;

  void validate() const;

  int embed_dim() const { return dec_hidden; }
  // Output width of the listener stack; doubles once more when the final
  // layer's output is itself pair-compressed.
  int enc_out_dim() const;
  int context_dim() const;
  bool per_head_projection() const { return attn_heads > 1; }
  // Encoder length U produced from T input steps.
  int encoder_len(int t) const;
};

// Named parameter arrays in a stable order (checkpoint layout order).
struct ParamStore {
  std::vector<std::pair<std::string, ad::Array>> items;
  std::unordered_map<std::string, int> index;

  void add(const std::string& name, ad::Array value);
  ad::Array& get(const std::string& name);
  const ad::Array& get(const std::string& name) const;
  bool has(const std::string& name) const { return index.count(name) > 0; }
  std::size_t count() const { return items.size(); }
};

// Parameter node ids on one tape.
struct BoundParams {
  std::unordered_map<std::string, ad::NodeId> ids;
  ad::NodeId at(const std::string& name) const;
};

struct AttentionOutput {
  ad::NodeId context;    // 1 x context_dim
  ad::NodeId alignment;  // heads x U, rows sum to 1
  ad::NodeId energies;   // heads x U
};

struct SpellState {
  std::vector<std::pair<ad::NodeId, ad::NodeId>> layers;  // (h, c) rows
  ad::NodeId context;
  ad::NodeId alignment;  // previous alignment, one-hot at u=0 initially
};

struct TeacherForwardResult {
  std::vector<ad::NodeId> step_logits;  // one 1 x vocab node per target step
  ad::NodeId encoder_states;            // U x enc_out_dim
  int sampled_steps = 0;                // steps fed a model prediction
  int eligible_steps = 0;               // steps where sampling was possible
};

class LasModel {
 public:
  LasModel(ModelConfig cfg, std::uint64_t init_seed);
  LasModel(ModelConfig cfg, ParamStore params);

  const ModelConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  BoundParams bind(ad::Tape& tape) const;

  ad::NodeId listen(ad::Tape& tape, const BoundParams& p,
                    const ad::Array& feats, Mode mode,
                    util::Rng* dropout_rng) const;

  AttentionOutput attend(ad::Tape& tape, const BoundParams& p,
                         ad::NodeId query, ad::NodeId enc,
                         ad::NodeId prev_alignment) const;

  SpellState initial_state(ad::Tape& tape, int enc_len) const;

  std::pair<SpellState, ad::NodeId> spell_step(ad::Tape& tape,
                                               const BoundParams& p,
                                               const SpellState& state,
                                               int y_prev, ad::NodeId enc,
                                               Mode mode,
                                               util::Rng* dropout_rng) const;

  // Teacher-forced pass; with probability ss_prob each step after the first
  // feeds the argmax of the previous predicted distribution instead of the
  // ground-truth token.
  TeacherForwardResult forward_teacher(ad::Tape& tape, const BoundParams& p,
                                       const ad::Array& feats,
                                       const std::vector<int>& targets,
                                       double ss_prob, Mode mode,
                                       util::Rng* rng) const;

  // Sum over steps of log P(token_i | ...) for a complete <sos>...<eos>
  // sequence; differentiable through the tape.
  ad::NodeId score_sequence(ad::Tape& tape, const BoundParams& p,
                            ad::NodeId enc,
                            const std::vector<int>& targets) const;

  // Frame-level logits over vocab+1 classes (blank last) from the shared
  // listener output.
  ad::NodeId ctc_frame_logits(ad::Tape& tape, const BoundParams& p,
                              ad::NodeId enc) const;
  int ctc_blank_id() const { return cfg_.vocab_size; }

 private:
  void init_params(std::uint64_t seed);

  ModelConfig cfg_;
  ParamStore params_;
};

void validate_targets(const std::vector<int>& targets, int vocab_size);

}  // namespace lasr::model
