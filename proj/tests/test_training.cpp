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

#include <filesystem>

#include "doctest.h"
#include "lasr/io.hpp"
#include "lasr/synth.hpp"
#include "lasr/train.hpp"

using namespace lasr::train;
using lasr::model::LasModel;
using lasr::model::ModelConfig;

namespace {

namespace fs = std::filesystem;

struct Fixture {
  std::string dir;
  std::vector<lasr::frontend::ManifestEntry> manifest;
  lasr::tokenizer::SubwordModel subwords;
  DataConfig data;
  std::vector<Sample> samples;

  explicit Fixture(const std::string& name, int utts = 4) {
    dir = (fs::temp_directory_path() / name).string();
    fs::remove_all(dir);
    lasr::synth::SynthOptions opts;
    opts.num_utterances = utts;
    opts.seed = 11;
    manifest = lasr::synth::write_corpus(dir, opts, "t");
    std::vector<std::string> texts;
    for (const auto& e : manifest) texts.push_back(e.text);
    lasr::tokenizer::UnigramTrainOptions topts;
    topts.vocab_size = 40;
    subwords = lasr::tokenizer::train_unigram(texts, topts);
    data.n_mels = 10;
    data.stack = 3;
    data.augment = true;
    data.freq_mask = 3;
    data.time_mask = 10;
    samples = load_samples(manifest, data, subwords);
  }

  ModelConfig model_config() const {
    ModelConfig cfg;
    cfg.input_dim = data.stacked_dim();
    cfg.vocab_size = subwords.vocab_size();
    cfg.enc_layers = 1;
    cfg.compress_after = {1};
    cfg.enc_hidden = 6;
    cfg.dec_layers = 1;
    cfg.dec_hidden = 6;
    cfg.attn_kind = lasr::model::AttnKind::kContent;
    cfg.attn_heads = 1;
    cfg.head_size = 6;
    cfg.dropout = 0.1;
    return cfg;
  }
};

std::vector<double> flatten_params(const lasr::model::ParamStore& store) {
  std::vector<double> all;
  for (const auto& [name, value] : store.items)
    all.insert(all.end(), value.data.begin(), value.data.end());
  return all;
}

}  // namespace

TEST_SUITE_BEGIN("training");

TEST_CASE("the sampling schedule matches the published constants") {
  ModelConfig cfg;
  cfg.vocab_size = 10;  // schedule fields keep their defaults
  CHECK(ss_prob(5, cfg) == 0.0);
  CHECK(ss_prob(20, cfg) == 0.0);
  CHECK(ss_prob(25, cfg) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(ss_prob(35, cfg) == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(ss_prob(60, cfg) == doctest::Approx(0.30).epsilon(1e-12));
}

TEST_CASE("the schedule is non-decreasing and capped") {
  ModelConfig cfg;
  cfg.vocab_size = 10;
  double prev = 0.0;
  for (int epoch = 0; epoch <= 80; ++epoch) {
    const double p = ss_prob(epoch, cfg);
    CHECK(p >= prev);
    CHECK(p <= cfg.ss_max);
    prev = p;
  }
}

TEST_CASE("training is bit-deterministic under a fixed seed") {
  const Fixture fx("lasr_train_det");
  auto run = [&] {
    LasModel m(fx.model_config(), 7);
    Trainer trainer(&m, TrainerConfig{}, fx.data, 99);
    trainer.train_epoch(fx.samples, Objective::kCe);
    trainer.train_epoch(fx.samples, Objective::kCe);
    return flatten_params(m.params());
  };
  CHECK(run() == run());
}

TEST_CASE("a zero learning rate leaves parameters untouched") {
  const Fixture fx("lasr_train_lr0");
  LasModel m(fx.model_config(), 7);
  const auto before = flatten_params(m.params());
  TrainerConfig cfg;
  cfg.optim.lr = 0.0;
  Trainer trainer(&m, cfg, fx.data, 99);
  trainer.train_epoch(fx.samples, Objective::kCe);
  CHECK(flatten_params(m.params()) == before);
}

TEST_CASE("the joint objective trains end to end") {
  const Fixture fx("lasr_train_joint");
  LasModel m(fx.model_config(), 7);
  Trainer trainer(&m, TrainerConfig{}, fx.data, 99);
  const double first = trainer.train_epoch(fx.samples, Objective::kCeCtc);
  CHECK(std::isfinite(first));
}

TEST_CASE("the expected-error objective trains end to end") {
  const Fixture fx("lasr_train_mwer", 3);
  LasModel m(fx.model_config(), 7);
  TrainerConfig cfg;
  cfg.mwer_nbest = 3;
  cfg.mwer_max_len = 16;
  Trainer trainer(&m, cfg, fx.data, 99);
  trainer.set_subwords(&fx.subwords);
  const double loss = trainer.train_epoch(fx.samples, Objective::kCeMwer);
  CHECK(std::isfinite(loss));
}

TEST_CASE("resumed training matches uninterrupted training bit-exactly") {
  const Fixture fx("lasr_train_resume");
  const std::string ckpt =
      (fs::temp_directory_path() / "lasr_train_resume" / "state.ckpt").string();

  // Uninterrupted: two epochs.
  LasModel continuous(fx.model_config(), 7);
  Trainer trainer_a(&continuous, TrainerConfig{}, fx.data, 99);
  trainer_a.train_epoch(fx.samples, Objective::kCe);
  trainer_a.train_epoch(fx.samples, Objective::kCe);

  // Interrupted: one epoch, checkpoint, restore into fresh objects, resume.
  LasModel first_half(fx.model_config(), 7);
  Trainer trainer_b(&first_half, TrainerConfig{}, fx.data, 99);
  trainer_b.train_epoch(fx.samples, Objective::kCe);
  save_train_state(ckpt, first_half, trainer_b, 0, 1);

  LasModel resumed(fx.model_config(), 1234);  // init is fully overwritten
  Trainer trainer_c(&resumed, TrainerConfig{}, fx.data, 5678);
  const ResumePoint rp = load_train_state(ckpt, &resumed, &trainer_c);
  CHECK(rp.pass_index == 0);
  CHECK(rp.epoch_in_pass == 1);
  CHECK(trainer_c.epoch() == 1);
  trainer_c.train_epoch(fx.samples, Objective::kCe);

  CHECK(flatten_params(resumed.params()) ==
        flatten_params(continuous.params()));
}

TEST_CASE("train-state checkpoints save byte-identically after a round trip") {
  const Fixture fx("lasr_train_state_rt");
  LasModel m(fx.model_config(), 7);
  Trainer trainer(&m, TrainerConfig{}, fx.data, 99);
  trainer.train_epoch(fx.samples, Objective::kCe);
  const auto base = fs::temp_directory_path() / "lasr_train_state_rt";
  const std::string p1 = (base / "s1.ckpt").string();
  const std::string p2 = (base / "s2.ckpt").string();
  save_train_state(p1, m, trainer, 0, 1);

  LasModel m2(fx.model_config(), 1);
  Trainer t2(&m2, TrainerConfig{}, fx.data, 1);
  load_train_state(p1, &m2, &t2);
  save_train_state(p2, m2, t2, 0, 1);
  CHECK(lasr::util::read_file(p1) == lasr::util::read_file(p2));
}

TEST_CASE("loading a train state into a mismatched config names the field") {
  const Fixture fx("lasr_train_state_cfg");
  LasModel m(fx.model_config(), 7);
  Trainer trainer(&m, TrainerConfig{}, fx.data, 99);
  const auto base = fs::temp_directory_path() / "lasr_train_state_cfg";
  const std::string path = (base / "s.ckpt").string();
  save_train_state(path, m, trainer, 0, 0);

  ModelConfig wrong = fx.model_config();
  wrong.vocab_size += 1;
  LasModel m2(wrong, 7);
  Trainer t2(&m2, TrainerConfig{}, fx.data, 99);
  CHECK_THROWS_WITH_AS(load_train_state(path, &m2, &t2),
                       doctest::Contains("vocab_size"), lasr::Error);
}

TEST_CASE("a one-pass plan equals the plain epoch loop") {
  const Fixture fx("lasr_plan_single");
  PlanSpec plan;
  plan.seed = 99;
  plan.data = fx.data;
  plan.model = fx.model_config();
  plan.passes = {{"only", fx.dir + "/manifest.jsonl", 2, Objective::kCe}};

  LasModel via_plan(plan.model, plan.seed);
  run_plan(plan, fx.subwords, &via_plan);

  LasModel plain(plan.model, plan.seed);
  Trainer trainer(&plain, plan.trainer, plan.data, plan.seed);
  trainer.set_subwords(&fx.subwords);
  trainer.train_epoch(fx.samples, Objective::kCe);
  trainer.train_epoch(fx.samples, Objective::kCe);

  CHECK(flatten_params(via_plan.params()) == flatten_params(plain.params()));
}

TEST_CASE("a second pass with zero epochs changes nothing") {
  const Fixture fx("lasr_plan_zero");
  PlanSpec plan;
  plan.seed = 99;
  plan.data = fx.data;
  plan.model = fx.model_config();
  const std::string manifest = fx.dir + "/manifest.jsonl";
  plan.passes = {{"p1", manifest, 2, Objective::kCe},
                 {"p2", manifest, 0, Objective::kCe}};
  LasModel two_pass(plan.model, plan.seed);
  const auto metrics = run_plan(plan, fx.subwords, &two_pass);
  CHECK(metrics.size() == 2);

  PlanSpec single = plan;
  single.passes = {{"p1", manifest, 2, Objective::kCe}};
  LasModel one_pass(single.model, single.seed);
  run_plan(single, fx.subwords, &one_pass);
  CHECK(flatten_params(two_pass.params()) == flatten_params(one_pass.params()));
}

TEST_CASE("a missing dataset fails before any training") {
  const Fixture fx("lasr_plan_missing");
  PlanSpec plan;
  plan.data = fx.data;
  plan.model = fx.model_config();
  plan.passes = {{"p1", "/nonexistent/manifest.jsonl", 1, Objective::kCe}};
  LasModel m(plan.model, 1);
  const auto before = flatten_params(m.params());
  CHECK_THROWS_AS(run_plan(plan, fx.subwords, &m), lasr::Error);
  CHECK(flatten_params(m.params()) == before);
}

TEST_SUITE_END();
