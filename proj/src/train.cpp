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

#include "lasr/train.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "lasr/checkpoint.hpp"
#include "lasr/error.hpp"
#include "lasr/eval.hpp"
#include "lasr/losses.hpp"
#include "lasr/wav.hpp"

namespace lasr::train {

using ad::Array;
using ad::NodeId;
using ad::Tape;

std::string objective_name(Objective o) {
  switch (o) {
    case Objective::kCe: return "ce";
    case Objective::kCeCtc: return "ce+ctc";
    case Objective::kCeMwer: return "ce+mwer";
    case Objective::kPhonemeCtc: return "phoneme-ctc";
  }
  fail("objective_name: bad enum value");
}

Objective objective_from_name(const std::string& name) {
  if (name == "ce") return Objective::kCe;
  if (name == "ce+ctc") return Objective::kCeCtc;
  if (name == "ce+mwer") return Objective::kCeMwer;
  if (name == "phoneme-ctc") return Objective::kPhonemeCtc;
  fail("unknown objective '", name, "', expected ce|ce+ctc|ce+mwer|phoneme-ctc");
}

Adam::Adam(OptimizerConfig cfg, const model::ParamStore& like) : cfg_(cfg) {
  for (const auto& [name, value] : like.items) {
    m_.add(name, Array::zeros(value.rows, value.cols));
    v_.add(name, Array::zeros(value.rows, value.cols));
  }
}

void Adam::apply(model::ParamStore& params,
                 std::vector<std::pair<std::string, Array>>& grads) {
  // Global norm clip.
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (double v : g.data) sq += v * v;
  const double norm = std::sqrt(sq);
  if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) {
    const double scale = cfg_.clip_norm / norm;
    for (auto& [name, g] : grads)
      for (double& v : g.data) v *= scale;
  }

  step_ += 1;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (auto& [name, g] : grads) {
    Array& p = params.get(name);
    Array& m = m_.get(name);
    Array& v = v_.get(name);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      m.data[i] = cfg_.beta1 * m.data[i] + (1.0 - cfg_.beta1) * g.data[i];
      v.data[i] =
          cfg_.beta2 * v.data[i] + (1.0 - cfg_.beta2) * g.data[i] * g.data[i];
      const double mh = m.data[i] / bc1;
      const double vh = v.data[i] / bc2;
      p.data[i] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
    }
  }
}

void Adam::restore(std::uint64_t step, model::ParamStore m,
                   model::ParamStore v) {
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

double ss_prob(int epoch, const model::ModelConfig& cfg) {
  check(epoch >= 0, "ss_prob: epoch must be >= 0");
  const double p = cfg.ss_rate * (epoch - cfg.ss_start_epoch);
  return std::clamp(p, 0.0, cfg.ss_max);
}

std::vector<Sample> load_samples(
    const std::vector<frontend::ManifestEntry>& manifest,
    const DataConfig& data, const tokenizer::SubwordModel& subwords,
    const tokenizer::Lexicon* lexicon) {
  std::vector<Sample> samples;
  samples.reserve(manifest.size());
  for (const auto& entry : manifest) {
    Sample s;
    s.id = entry.id;
    s.text = entry.text;
    const frontend::WavData wav = frontend::read_wav(entry.audio_path);
    frontend::AudioUtterance utt{entry.id, wav.samples, wav.sample_rate_hz,
                                 entry.text};
    s.log_mel =
        frontend::compute_log_mel(utt, data.n_mels, data.window_ms,
                                  data.hop_ms);
    s.ctc_targets = tokenizer::encode(subwords, entry.text);
    s.targets = tokenizer::add_sentinels(s.ctc_targets);
    if (lexicon) s.phonemes = tokenizer::to_phonemes(*lexicon, entry.text);
    samples.push_back(std::move(s));
  }
  return samples;
}

Trainer::Trainer(model::LasModel* las, TrainerConfig cfg,
                 const DataConfig& data, std::uint64_t seed)
    : las_(las), cfg_(cfg), data_(data), rng_(seed),
      adam_(cfg.optim, las->params()) {}

Trainer::Trainer(decode::PhonemeCtcScorer* scorer, TrainerConfig cfg,
                 const DataConfig& data, std::uint64_t seed)
    : scorer_(scorer), cfg_(cfg), data_(data), rng_(seed),
      adam_(cfg.optim, scorer->params()) {}

Array Trainer::prepare_features(const Sample& sample) {
  frontend::FeatureSequence feat = sample.log_mel;
  if (data_.augment) {
    frontend::AugmentPolicy policy;
    policy.freq_mask_param = data_.freq_mask;
    policy.time_mask_param = data_.time_mask;
    policy.masks_per_axis = data_.masks_per_axis;
    policy.seed = rng_.next_u64();
    feat = frontend::spec_augment(feat, policy);
  }
  return frontend::stack_frames(feat, data_.stack).frames;
}

double Trainer::utterance_loss(Tape& tape, const model::BoundParams& bound,
                               const Sample& sample, Objective objective,
                               const Array& feats, NodeId* loss_node) {
  if (objective == Objective::kPhonemeCtc) {
    check(scorer_ != nullptr, "train: phoneme-ctc objective needs a scorer");
    check(!sample.phonemes.empty(), "train: utterance ", sample.id,
          " has no phoneme targets (lexicon missing?)");
    const NodeId logits = scorer_->frame_logits(tape, bound, feats);
    *loss_node =
        losses::ctc_loss(tape, logits, sample.phonemes, scorer_->blank_id());
    return tape.value(*loss_node).item();
  }

  check(las_ != nullptr, "train: objective ", objective_name(objective),
        " needs the attention model");
  const auto& cfg = las_->config();
  const double ss = ss_prob(epoch_, cfg);
  const auto fwd = las_->forward_teacher(tape, bound, feats, sample.targets,
                                         ss, model::Mode::kTrain, &rng_);
  std::vector<int> labels(sample.targets.begin() + 1, sample.targets.end());
  const NodeId ce =
      losses::ce_smoothed(tape, fwd.step_logits, labels, cfg.label_smooth);

  switch (objective) {
    case Objective::kCe: {
      *loss_node = ce;
      break;
    }
    case Objective::kCeCtc: {
      const NodeId frame_logits =
          las_->ctc_frame_logits(tape, bound, fwd.encoder_states);
      const NodeId ctc = losses::ctc_loss(tape, frame_logits,
                                          sample.ctc_targets,
                                          las_->ctc_blank_id());
      *loss_node = losses::joint_loss(tape, ce, ctc, cfg.joint_lambda);
      break;
    }
    case Objective::kCeMwer: {
      decode::BeamSearchOptions beam_opts;
      beam_opts.beam = cfg_.mwer_nbest;
      beam_opts.max_len = cfg_.mwer_max_len;
      check(subwords_ != nullptr,
            "train: the expected-error objective needs set_subwords()");
      const auto nbest = decode::beam_search(*las_, feats, beam_opts);
      if (nbest.size() < 2) {
        *loss_node = ce;  // nothing to renormalize over
        break;
      }
      const auto ref_words = tokenizer::split_words(sample.text);
      std::vector<NodeId> scores;
      std::vector<double> errors;
      for (const auto& hyp : nbest) {
        scores.push_back(las_->score_sequence(
            tape, bound, fwd.encoder_states,
            tokenizer::add_sentinels(hyp.tokens)));
        // Word errors against the reference transcript.
        const auto hyp_words = tokenizer::split_words(
            tokenizer::decode(*subwords_, hyp.tokens));
        errors.push_back(static_cast<double>(
            eval::levenshtein_words(hyp_words, ref_words).errors()));
      }
      const NodeId stacked = tape.concat_cols(scores);
      const NodeId mwer = losses::mwer_loss(tape, stacked, errors);
      *loss_node = tape.add(tape.scale(ce, cfg.mwer_lambda), mwer);
      break;
    }
    case Objective::kPhonemeCtc:
      fail("unreachable");
  }
  return tape.value(*loss_node).item();
}

double Trainer::train_epoch(const std::vector<Sample>& dataset,
                            Objective objective) {
  check(!dataset.empty(), "train_epoch: empty dataset");
  std::vector<int> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<int>(i);
  rng_.shuffle(order);

  model::ParamStore& params =
      las_ != nullptr ? las_->params() : scorer_->params();

  double loss_sum = 0.0;
  int loss_count = 0;
  int batch_index = 0;
  for (std::size_t begin = 0; begin < order.size();
       begin += static_cast<std::size_t>(cfg_.batch_size), ++batch_index) {
    const std::size_t end =
        std::min(order.size(),
                 begin + static_cast<std::size_t>(cfg_.batch_size));
    std::vector<std::pair<std::string, Array>> grads;
    grads.reserve(params.items.size());
    for (const auto& [name, value] : params.items)
      grads.emplace_back(name, Array::zeros(value.rows, value.cols));

    for (std::size_t i = begin; i < end; ++i) {
      const Sample& sample = dataset[static_cast<std::size_t>(
          order[i])];
      const Array feats = prepare_features(sample);
      Tape tape;
      const model::BoundParams bound =
          las_ != nullptr ? las_->bind(tape) : scorer_->bind(tape);
      NodeId loss_node = 0;
      double loss = 0.0;
      try {
        loss = utterance_loss(tape, bound, sample, objective, feats,
                              &loss_node);
        check(std::isfinite(loss), "non-finite loss");
        tape.backward(loss_node);
      } catch (const Error& e) {
        fail("train_epoch: batch ", batch_index, ", utterance ", sample.id,
             ": ", e.what());
      }
      for (auto& [name, g] : grads) {
        const Array& got = tape.grad(bound.at(name));
        for (std::size_t k = 0; k < g.data.size(); ++k)
          g.data[k] += got.data[k];
      }
      loss_sum += loss;
      loss_count += 1;
    }

    const double inv = 1.0 / static_cast<double>(end - begin);
    for (auto& [name, g] : grads)
      for (double& v : g.data) v *= inv;
    adam_.apply(params, grads);
  }
  epoch_ += 1;
  return loss_sum / loss_count;
}

double teacher_accuracy(const model::LasModel& m, const DataConfig& data,
                        const std::vector<Sample>& dataset) {
  check(!dataset.empty(), "teacher_accuracy: empty dataset");
  int correct = 0, total = 0;
  for (const Sample& sample : dataset) {
    const Array feats = frontend::stack_frames(sample.log_mel, data.stack).frames;
    Tape tape;
    const model::BoundParams bound = m.bind(tape);
    const auto fwd = m.forward_teacher(tape, bound, feats, sample.targets, 0.0,
                                       model::Mode::kInfer, nullptr);
    for (std::size_t i = 0; i < fwd.step_logits.size(); ++i) {
      const Array& row = tape.value(fwd.step_logits[i]);
      int best = 0;
      for (int k = 1; k < row.cols; ++k)
        if (row.data[static_cast<std::size_t>(k)] >
            row.data[static_cast<std::size_t>(best)])
          best = k;
      correct += best == sample.targets[i + 1] ? 1 : 0;
      total += 1;
    }
  }
  return static_cast<double>(correct) / total;
}

std::vector<PassMetrics> run_plan(const PlanSpec& plan,
                                  const tokenizer::SubwordModel& subwords,
                                  model::LasModel* m,
                                  const EpochCallback& on_epoch,
                                  const std::string& state_path,
                                  const std::string& resume_from) {
  check(!plan.passes.empty(), "run_plan: no passes configured");
  for (const auto& pass : plan.passes)
    check(pass.epochs >= 0, "run_plan: pass ", pass.name,
          " has negative epochs");

  // Resolve every dataset before any training starts.
  std::vector<std::vector<Sample>> datasets;
  for (const auto& pass : plan.passes) {
    datasets.push_back(load_samples(frontend::read_manifest(pass.manifest),
                                    plan.data, subwords));
  }
  std::vector<Sample> val_samples;
  if (!plan.val_manifest.empty()) {
    val_samples = load_samples(frontend::read_manifest(plan.val_manifest),
                               plan.data, subwords);
  }

  Trainer trainer(m, plan.trainer, plan.data, plan.seed);
  trainer.set_subwords(&subwords);
  ResumePoint start;
  if (!resume_from.empty()) start = load_train_state(resume_from, m, &trainer);

  std::vector<PassMetrics> metrics;
  for (std::size_t p = 0; p < plan.passes.size(); ++p) {
    const PassSpec& pass = plan.passes[p];
    PassMetrics pm;
    pm.name = pass.name;
    pm.epochs = pass.epochs;
    const int first_epoch =
        static_cast<int>(p) < start.pass_index
            ? pass.epochs
            : (static_cast<int>(p) == start.pass_index ? start.epoch_in_pass
                                                       : 0);
    for (int e = first_epoch; e < pass.epochs; ++e) {
      const double ss = ss_prob(trainer.epoch(), m->config());
      pm.final_loss = trainer.train_epoch(datasets[p], pass.objective);
      if (on_epoch) on_epoch(pass.name, trainer.epoch(), pm.final_loss, ss);
      if (!state_path.empty())
        save_train_state(state_path, *m, trainer, static_cast<int>(p), e + 1);
    }
    if (!val_samples.empty()) {
      std::vector<std::string> hyps, refs;
      for (const Sample& s : val_samples) {
        const Array feats =
            frontend::stack_frames(s.log_mel, plan.data.stack).frames;
        const auto nbest = decode::beam_search(*m, feats, plan.val_beam);
        hyps.push_back(tokenizer::decode(subwords, nbest.front().tokens));
        refs.push_back(s.text);
      }
      pm.val_wer = eval::corpus_wer(hyps, refs);
    }
    metrics.push_back(pm);
  }
  return metrics;
}

nlohmann::json data_config_to_json(const DataConfig& data) {
  nlohmann::json j;
  j["n_mels"] = data.n_mels;
  j["window_ms"] = data.window_ms;
  j["hop_ms"] = data.hop_ms;
  j["stack"] = data.stack;
  j["augment"] = data.augment;
  j["freq_mask"] = data.freq_mask;
  j["time_mask"] = data.time_mask;
  j["masks_per_axis"] = data.masks_per_axis;
  return j;
}

DataConfig data_config_from_json(const nlohmann::json& j) {
  DataConfig data;
  data.n_mels = j.at("n_mels").get<int>();
  data.window_ms = j.at("window_ms").get<double>();
  data.hop_ms = j.at("hop_ms").get<double>();
  data.stack = j.at("stack").get<int>();
  data.augment = j.at("augment").get<bool>();
  data.freq_mask = j.at("freq_mask").get<int>();
  data.time_mask = j.at("time_mask").get<int>();
  data.masks_per_axis = j.at("masks_per_axis").get<int>();
  return data;
}

namespace {

std::string rng_state_hex(const util::Rng& rng) {
  const auto st = rng.state();
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx%016llx%016llx",
                static_cast<unsigned long long>(st[0]),
                static_cast<unsigned long long>(st[1]),
                static_cast<unsigned long long>(st[2]),
                static_cast<unsigned long long>(st[3]));
  return buf;
}

std::array<std::uint64_t, 4> rng_state_from_hex(const std::string& hex) {
  check(hex.size() == 64, "train state: bad RNG state length ", hex.size());
  std::array<std::uint64_t, 4> st{};
  for (int i = 0; i < 4; ++i)
    st[static_cast<std::size_t>(i)] =
        std::stoull(hex.substr(static_cast<std::size_t>(i) * 16, 16), nullptr,
                    16);
  return st;
}

}  // namespace

void save_train_state(const std::string& path, const model::LasModel& m,
                      const Trainer& trainer, int pass_index,
                      int epoch_in_pass) {
  ckpt::Container c;
  c.kind = "las_train";
  c.meta["config"] = ckpt::model_config_to_json(m.config());
  c.meta["pass_index"] = pass_index;
  c.meta["epoch_in_pass"] = epoch_in_pass;
  c.meta["global_epoch"] = trainer.epoch();
  c.meta["adam_step"] = trainer.optimizer().step();
  c.meta["rng"] = rng_state_hex(trainer.rng());
  c.stores.emplace_back("params", m.params());
  c.stores.emplace_back("adam_m", trainer.optimizer().moments_m());
  c.stores.emplace_back("adam_v", trainer.optimizer().moments_v());
  ckpt::save(path, c);
}

ResumePoint load_train_state(const std::string& path, model::LasModel* m,
                             Trainer* trainer) {
  ckpt::Container c = ckpt::load(path);
  check(c.kind == "las_train", "checkpoint: ", path, " holds '", c.kind,
        "', expected 'las_train'");
  const model::ModelConfig cfg =
      ckpt::model_config_from_json(c.meta.at("config"));
  ckpt::require_same_config(m->config(), cfg);
  m->params() = c.store("params");
  trainer->optimizer().restore(c.meta.at("adam_step").get<std::uint64_t>(),
                               c.store("adam_m"), c.store("adam_v"));
  trainer->rng().set_state(
      rng_state_from_hex(c.meta.at("rng").get<std::string>()));
  trainer->set_epoch(c.meta.at("global_epoch").get<int>());
  ResumePoint rp;
  rp.pass_index = c.meta.at("pass_index").get<int>();
  rp.epoch_in_pass = c.meta.at("epoch_in_pass").get<int>();
  return rp;
}

}  // namespace lasr::train
