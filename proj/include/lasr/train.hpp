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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lasr/decode.hpp"
#include "lasr/frontend.hpp"
#include "lasr/model.hpp"
#include "lasr/scorer.hpp"
#include "lasr/tokenizer.hpp"

namespace lasr::train {

enum class Objective { kCe, kCeCtc, kCeMwer, kPhonemeCtc };

std::string objective_name(Objective o);
Objective objective_from_name(const std::string& name);

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient norm
};

// Adaptive-moment gradient descent over a ParamStore.
class Adam {
 public:
  Adam() = default;
  Adam(OptimizerConfig cfg, const model::ParamStore& like);

  // grads must mirror the parameter layout; clipped to cfg.clip_norm first.
  void apply(model::ParamStore& params,
             std::vector<std::pair<std::string, ad::Array>>& grads);

  const OptimizerConfig& config() const { return cfg_; }
  std::uint64_t step() const { return step_; }
  const model::ParamStore& moments_m() const { return m_; }
  const model::ParamStore& moments_v() const { return v_; }
  void restore(std::uint64_t step, model::ParamStore m, model::ParamStore v);

 private:
  OptimizerConfig cfg_;
  std::uint64_t step_ = 0;
  model::ParamStore m_, v_;
};

// Scheduled-sampling probability for an epoch:
// clamp(ss_rate * (epoch - ss_start_epoch), 0, ss_max).
double ss_prob(int epoch, const model::ModelConfig& cfg);

// A preprocessed utterance; log-mel is kept unaugmented so each epoch can
// draw fresh masks.
struct Sample {
  std::string id;
  frontend::FeatureSequence log_mel;
  std::string text;
  std::vector<int> targets;      // <sos> ... <eos>
  std::vector<int> ctc_targets;  // payload ids
  std::vector<int> phonemes;     // scorer targets; empty without a lexicon
};

struct DataConfig {
  int n_mels = 80;
  double window_ms = 20.0;
  double hop_ms = 10.0;
  int stack = 3;
  bool augment = true;
  int freq_mask = 27;
  int time_mask = 100;
  int masks_per_axis = 1;

  int stacked_dim() const { return n_mels * stack; }
};

std::vector<Sample> load_samples(
    const std::vector<frontend::ManifestEntry>& manifest,
    const DataConfig& data, const tokenizer::SubwordModel& subwords,
    const tokenizer::Lexicon* lexicon = nullptr);

struct TrainerConfig {
  OptimizerConfig optim;
  int batch_size = 4;
  int mwer_nbest = 4;
  int mwer_max_len = 48;
};

// Single-writer training driver for either the attention model or the
// phoneme scorer. All randomness (shuffling, augmentation, sampling coins,
// dropout masks) flows from one checkpointable stream.
class Trainer {
 public:
  Trainer(model::LasModel* las, TrainerConfig cfg, const DataConfig& data,
          std::uint64_t seed);
  Trainer(decode::PhonemeCtcScorer* scorer, TrainerConfig cfg,
          const DataConfig& data, std::uint64_t seed);

  // One shuffle-and-iterate pass; returns the mean loss and advances the
  // epoch counter.
  double train_epoch(const std::vector<Sample>& dataset, Objective objective);

  int epoch() const { return epoch_; }
  util::Rng& rng() { return rng_; }
  const util::Rng& rng() const { return rng_; }
  Adam& optimizer() { return adam_; }
  const Adam& optimizer() const { return adam_; }
  const TrainerConfig& config() const { return cfg_; }
  void set_epoch(int epoch) { epoch_ = epoch; }
  // The subword inventory is only needed for the expected-error objective,
  // which compares decoded hypothesis words against the transcript.
  void set_subwords(const tokenizer::SubwordModel* subwords) {
    subwords_ = subwords;
  }

 private:
  double utterance_loss(ad::Tape& tape, const model::BoundParams& bound,
                        const Sample& sample, Objective objective,
                        const ad::Array& feats, ad::NodeId* loss_node);
  ad::Array prepare_features(const Sample& sample);

  model::LasModel* las_ = nullptr;
  decode::PhonemeCtcScorer* scorer_ = nullptr;
  const tokenizer::SubwordModel* subwords_ = nullptr;
  TrainerConfig cfg_;
  DataConfig data_;
  util::Rng rng_;
  Adam adam_;
  int epoch_ = 0;
};

// Teacher-forced argmax token accuracy (no sampling, no dropout).
double teacher_accuracy(const model::LasModel& m, const DataConfig& data,
                        const std::vector<Sample>& dataset);

struct PassSpec {
  std::string name;
  std::string manifest;
  int epochs = 0;
  Objective objective = Objective::kCe;
};

struct PassMetrics {
  std::string name;
  int epochs = 0;
  double final_loss = 0.0;
  double val_wer = -1.0;  // -1 when no validation set is configured
};

struct PlanSpec {
  std::vector<PassSpec> passes;
  std::string val_manifest;  // optional
  std::uint64_t seed = 42;
  TrainerConfig trainer;
  DataConfig data;
  model::ModelConfig model;
  decode::BeamSearchOptions val_beam;
};

using EpochCallback = std::function<void(const std::string& pass, int epoch,
                                         double loss, double ss)>;

// Executes the passes in order, carrying parameters over; per-pass validation
// WER is computed when a validation manifest is configured. When state_path
// is set the train state is checkpointed after every epoch; when resume_from
// is set training continues from that state.
std::vector<PassMetrics> run_plan(const PlanSpec& plan,
                                  const tokenizer::SubwordModel& subwords,
                                  model::LasModel* m,
                                  const EpochCallback& on_epoch = nullptr,
                                  const std::string& state_path = "",
                                  const std::string& resume_from = "");

nlohmann::json data_config_to_json(const DataConfig& data);
DataConfig data_config_from_json(const nlohmann::json& j);

// Train-state checkpoint: parameters, optimizer moments, counters and the
// RNG stream; resuming reproduces uninterrupted training bit-exactly.
void save_train_state(const std::string& path, const model::LasModel& m,
                      const Trainer& trainer, int pass_index,
                      int epoch_in_pass);

struct ResumePoint {
  int pass_index = 0;
  int epoch_in_pass = 0;
};

ResumePoint load_train_state(const std::string& path, model::LasModel* m,
                             Trainer* trainer);

}  // namespace lasr::train
