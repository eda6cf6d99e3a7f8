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

// Command line front door: featurize, tokenizer-train, lm-train, train,
// decode, rescore, evaluate and gradcheck subcommands over one binary.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "lasr/checkpoint.hpp"
#include "lasr/config.hpp"
#include "lasr/decode.hpp"
#include "lasr/diagnostics.hpp"
#include "lasr/error.hpp"
#include "lasr/eval.hpp"
#include "lasr/frontend.hpp"
#include "lasr/io.hpp"
#include "lasr/lm.hpp"
#include "lasr/losses.hpp"
#include "lasr/model.hpp"
#include "lasr/scorer.hpp"
#include "lasr/synth.hpp"
#include "lasr/tokenizer.hpp"
#include "lasr/train.hpp"
#include "lasr/wav.hpp"

namespace fs = std::filesystem;
using lasr::check;
using lasr::Error;

namespace {

// ---------------------------------------------------------------------------
// shared helpers

lasr::frontend::FeatureSequence features_for(
    const lasr::frontend::ManifestEntry& entry,
    const lasr::train::DataConfig& data, const std::string& feature_dir) {
  if (!feature_dir.empty()) {
    const fs::path cached = fs::path(feature_dir) / (entry.id + ".fea");
    if (fs::exists(cached))
      return lasr::frontend::load_features(cached.string());
  }
  const auto wav = lasr::frontend::read_wav(entry.audio_path);
  lasr::frontend::AudioUtterance utt{entry.id, wav.samples, wav.sample_rate_hz,
                                     entry.text};
  return lasr::frontend::compute_log_mel(utt, data.n_mels, data.window_ms,
                                         data.hop_ms);
}

struct NBestRecord {
  std::string utt_id;
  std::vector<lasr::decode::Hypothesis> hyps;
};

void write_nbest(const std::string& path,
                 const std::vector<NBestRecord>& records) {
  lasr::util::atomic_write(path, [&](std::ostream& os) {
    for (const auto& rec : records) {
      int rank = 1;
      for (const auto& hyp : rec.hyps) {
        nlohmann::json j;
        j["utt_id"] = rec.utt_id;
        j["rank"] = rank++;
        j["text"] = hyp.text;
        j["las"] = hyp.las_score;
        if (hyp.lm_scored) {
          j["lm"] = hyp.lm_score;
        } else {
          j["lm"] = nullptr;
        }
        if (hyp.phoneme_scorable) {
          j["phone"] = hyp.phoneme_ctc_score;
        } else {
          j["phone"] = nullptr;
        }
        os << j.dump() << "\n";
      }
    }
  });
}

std::vector<NBestRecord> read_nbest(const std::string& path) {
  std::vector<NBestRecord> records;
  std::map<std::string, std::size_t> index;
  for (const std::string& line : lasr::util::read_lines(path)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    const std::string utt_id = j.at("utt_id").get<std::string>();
    if (!index.count(utt_id)) {
      index[utt_id] = records.size();
      records.push_back({utt_id, {}});
    }
    lasr::decode::Hypothesis hyp;
    hyp.text = j.at("text").get<std::string>();
    hyp.las_score = j.at("las").get<double>();
    if (j.contains("lm") && !j.at("lm").is_null()) {
      hyp.lm_score = j.at("lm").get<double>();
      hyp.lm_scored = true;
    }
    if (j.contains("phone") && !j.at("phone").is_null()) {
      hyp.phoneme_ctc_score = j.at("phone").get<double>();
    } else {
      hyp.phoneme_scorable = false;
    }
    records[index[utt_id]].hyps.push_back(std::move(hyp));
  }
  return records;
}

void write_hyp_file(const std::string& path,
                    const std::vector<NBestRecord>& records) {
  lasr::util::atomic_write(path, [&](std::ostream& os) {
    for (const auto& rec : records) {
      nlohmann::json j;
      j["utt_id"] = rec.utt_id;
      j["text"] = rec.hyps.empty() ? "" : rec.hyps.front().text;
      os << j.dump() << "\n";
    }
  });
}

// ---------------------------------------------------------------------------
// subcommand options

struct FeaturizeArgs {
  std::string manifest, out;
  int n_mels = 80;
  double window_ms = 20.0, hop_ms = 10.0;
  bool augment = false;
  int freq_mask = 27, time_mask = 100, masks_per_axis = 1;
  std::uint64_t seed = 42;
};

int run_featurize(const FeaturizeArgs& args) {
  const auto manifest = lasr::frontend::read_manifest(args.manifest);
  fs::create_directories(args.out);
  lasr::util::Rng rng(args.seed);
  for (const auto& entry : manifest) {
    const auto wav = lasr::frontend::read_wav(entry.audio_path);
    lasr::frontend::AudioUtterance utt{entry.id, wav.samples,
                                       wav.sample_rate_hz, entry.text};
    auto feat = lasr::frontend::compute_log_mel(utt, args.n_mels,
                                                args.window_ms, args.hop_ms);
    if (args.augment) {
      lasr::frontend::AugmentPolicy policy;
      policy.freq_mask_param = args.freq_mask;
      policy.time_mask_param = args.time_mask;
      policy.masks_per_axis = args.masks_per_axis;
      policy.seed = rng.next_u64();
      feat = lasr::frontend::spec_augment(feat, policy);
    }
    lasr::frontend::save_features(
        (fs::path(args.out) / (entry.id + ".fea")).string(), entry.id, feat);
  }
  std::cout << "featurized " << manifest.size() << " utterances into "
            << args.out << "\n";
  return 0;
}

struct TokTrainArgs {
  std::string manifest, text, out;
  int vocab_size = 200;
  int max_piece_len = 6;
};

int run_tokenizer_train(const TokTrainArgs& args) {
  std::vector<std::string> corpus;
  if (!args.text.empty()) {
    corpus = lasr::util::read_lines(args.text);
  } else {
    check(!args.manifest.empty(),
          "tokenizer-train needs --manifest or --text");
    for (const auto& e : lasr::frontend::read_manifest(args.manifest))
      corpus.push_back(e.text);
  }
  lasr::tokenizer::UnigramTrainOptions opts;
  opts.vocab_size = args.vocab_size;
  opts.max_piece_len = args.max_piece_len;
  const auto model = lasr::tokenizer::train_unigram(corpus, opts);
  lasr::tokenizer::save_model(model, args.out);
  std::cout << "trained subword model with " << model.vocab_size()
            << " entries -> " << args.out << "\n";
  return 0;
}

struct LmTrainArgs {
  std::string text, out;
  int order = 4;
  double discount = 0.75;
};

int run_lm_train(const LmTrainArgs& args) {
  const auto lines = lasr::util::read_lines(args.text);
  lasr::lm::NGramTrainOptions opts;
  opts.order = args.order;
  opts.discount = args.discount;
  const auto lm = lasr::lm::ngram_train(lines, opts);
  lasr::lm::save_arpa(lm, args.out);
  std::size_t total = 0;
  for (const auto& table : lm.tables) total += table.size();
  std::cout << "trained order-" << args.order << " model with " << total
            << " n-grams -> " << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string config, out, resume;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;
};

lasr::train::DataConfig data_config_from_ini(const lasr::config::Ini& ini) {
  lasr::train::DataConfig data;
  data.n_mels = ini.get_int("data", "n_mels", data.n_mels);
  data.window_ms = ini.get_double("data", "window_ms", data.window_ms);
  data.hop_ms = ini.get_double("data", "hop_ms", data.hop_ms);
  data.stack = ini.get_int("data", "stack", data.stack);
  data.augment = ini.get_bool("data", "augment", data.augment);
  data.freq_mask = ini.get_int("data", "freq_mask", data.freq_mask);
  data.time_mask = ini.get_int("data", "time_mask", data.time_mask);
  data.masks_per_axis =
      ini.get_int("data", "masks_per_axis", data.masks_per_axis);
  return data;
}

lasr::model::ModelConfig model_config_from_ini(const lasr::config::Ini& ini,
                                               int input_dim, int vocab_size) {
  lasr::model::ModelConfig cfg;
  cfg.input_dim = input_dim;
  cfg.vocab_size = vocab_size;
  cfg.enc_layers = ini.get_int("model", "enc_layers", cfg.enc_layers);
  cfg.compress_after =
      ini.get_int_list("model", "compress_after", cfg.compress_after);
  cfg.enc_hidden = ini.get_int("model", "enc_hidden", cfg.enc_hidden);
  cfg.dec_layers = ini.get_int("model", "dec_layers", cfg.dec_layers);
  cfg.dec_hidden = ini.get_int("model", "dec_hidden", cfg.dec_hidden);
  cfg.attn_kind = lasr::model::attn_kind_from_name(
      ini.get("model", "attn_kind", "multihead"));
  cfg.attn_heads = ini.get_int("model", "attn_heads", cfg.attn_heads);
  cfg.head_size = ini.get_int("model", "head_size", cfg.head_size);
  cfg.loc_conv_channels =
      ini.get_int("model", "loc_conv_channels", cfg.loc_conv_channels);
  cfg.loc_conv_width =
      ini.get_int("model", "loc_conv_width", cfg.loc_conv_width);
  cfg.dropout = ini.get_double("model", "dropout", cfg.dropout);
  cfg.label_smooth = ini.get_double("model", "label_smooth", cfg.label_smooth);
  cfg.joint_lambda = ini.get_double("model", "joint_lambda", cfg.joint_lambda);
  cfg.mwer_lambda = ini.get_double("model", "mwer_lambda", cfg.mwer_lambda);
  cfg.ss_start_epoch =
      ini.get_int("model", "ss_start_epoch", cfg.ss_start_epoch);
  cfg.ss_rate = ini.get_double("model", "ss_rate", cfg.ss_rate);
  cfg.ss_max = ini.get_double("model", "ss_max", cfg.ss_max);
  cfg.beam = ini.get_int("model", "beam", cfg.beam);
  return cfg;
}

int run_train(const TrainArgs& args) {
  lasr::config::Ini ini = lasr::config::Ini::parse_file(args.config);
  for (const auto& assignment : args.overrides) ini.set_override(assignment);

  const std::string kind = ini.get("model", "kind", "las");
  const auto data = data_config_from_ini(ini);
  fs::create_directories(args.out);

  const std::uint64_t seed =
      args.seed_set ? args.seed
                    : static_cast<std::uint64_t>(
                          ini.get_int("train", "seed", 42));
  lasr::train::TrainerConfig trainer_cfg;
  trainer_cfg.optim.lr = ini.get_double("train", "lr", trainer_cfg.optim.lr);
  trainer_cfg.optim.clip_norm =
      ini.get_double("train", "clip_norm", trainer_cfg.optim.clip_norm);
  trainer_cfg.batch_size =
      ini.get_int("train", "batch_size", trainer_cfg.batch_size);
  trainer_cfg.mwer_nbest =
      ini.get_int("train", "mwer_nbest", trainer_cfg.mwer_nbest);
  trainer_cfg.mwer_max_len =
      ini.get_int("train", "mwer_max_len", trainer_cfg.mwer_max_len);

  const std::string log_path = (fs::path(args.out) / "train_log.jsonl").string();
  std::ofstream log(log_path, std::ios::app);

  if (kind == "phoneme-ctc") {
    // Scorer training: a recurrent stack with the alignment-marginal loss
    // over lexicon phonemes.
    const auto lexicon =
        lasr::tokenizer::load_lexicon(ini.require("data", "lexicon"));
    lasr::decode::ScorerConfig cfg;
    cfg.input_dim = data.stacked_dim();
    cfg.num_phonemes = lexicon.num_phonemes();
    cfg.layers = ini.get_int("model", "layers", 5);
    cfg.hidden = ini.get_int("model", "hidden", 700);
    lasr::decode::PhonemeCtcScorer scorer(cfg, seed);
    lasr::train::Trainer trainer(&scorer, trainer_cfg, data, seed);

    // The subword inventory is irrelevant for phoneme targets, but the
    // sample loader wants one; a character placeholder keeps ids valid.
    lasr::tokenizer::UnigramTrainOptions topts;
    topts.vocab_size = 60;
    std::vector<std::string> texts;
    const auto section_names = ini.numbered_sections("pass.");
    check(!section_names.empty(), "train: no [pass.N] sections in ",
          args.config);
    for (const auto& section : section_names) {
      for (const auto& e : lasr::frontend::read_manifest(
               ini.require(section, "manifest")))
        texts.push_back(e.text);
    }
    const auto placeholder = lasr::tokenizer::train_unigram(texts, topts);

    for (const auto& section : section_names) {
      const auto manifest =
          lasr::frontend::read_manifest(ini.require(section, "manifest"));
      const auto samples =
          lasr::train::load_samples(manifest, data, placeholder, &lexicon);
      const int epochs = ini.get_int(section, "epochs", 1);
      for (int e = 0; e < epochs; ++e) {
        const double loss = trainer.train_epoch(
            samples, lasr::train::Objective::kPhonemeCtc);
        nlohmann::json j;
        j["pass"] = section;
        j["epoch"] = trainer.epoch();
        j["loss"] = loss;
        log << j.dump() << "\n" << std::flush;
      }
    }
    const std::string model_path = (fs::path(args.out) / "scorer.ckpt").string();
    nlohmann::json extra;
    extra["data"] = lasr::train::data_config_to_json(data);
    lasr::decode::save_scorer(model_path, scorer, &extra);
    std::cout << "saved phoneme scorer -> " << model_path << "\n";
    return 0;
  }

  check(kind == "las", "train: unknown model kind '", kind, "'");
  const auto subwords =
      lasr::tokenizer::load_model(ini.require("train", "tokenizer"));

  lasr::train::PlanSpec plan;
  plan.seed = seed;
  plan.data = data;
  plan.trainer = trainer_cfg;
  plan.model =
      model_config_from_ini(ini, data.stacked_dim(), subwords.vocab_size());
  plan.val_manifest = ini.get("train", "val_manifest", "");
  plan.val_beam.beam = ini.get_int("train", "val_beam", 4);
  plan.val_beam.max_len = ini.get_int("train", "val_max_len", 48);
  for (const auto& section : ini.numbered_sections("pass.")) {
    lasr::train::PassSpec pass;
    pass.name = section;
    pass.manifest = ini.require(section, "manifest");
    pass.epochs = ini.get_int(section, "epochs", 1);
    pass.objective =
        lasr::train::objective_from_name(ini.get(section, "objective", "ce"));
    plan.passes.push_back(std::move(pass));
  }

  lasr::model::LasModel model(plan.model, plan.seed);
  const std::string state_path = (fs::path(args.out) / "train_state.ckpt").string();
  const auto metrics = lasr::train::run_plan(
      plan, subwords, &model,
      [&log](const std::string& pass, int epoch, double loss, double ss) {
        nlohmann::json j;
        j["pass"] = pass;
        j["epoch"] = epoch;
        j["loss"] = loss;
        j["ss_prob"] = ss;
        log << j.dump() << "\n" << std::flush;
      },
      state_path, args.resume);

  for (const auto& pm : metrics) {
    nlohmann::json j;
    j["pass"] = pm.name;
    j["final_loss"] = pm.final_loss;
    if (pm.val_wer >= 0) j["val_wer"] = pm.val_wer;
    log << j.dump() << "\n";
    std::cout << j.dump() << "\n";
  }

  const std::string model_path = (fs::path(args.out) / "model.ckpt").string();
  nlohmann::json extra;
  extra["data"] = lasr::train::data_config_to_json(data);
  lasr::ckpt::save_las_model(model_path, model, &extra);
  std::cout << "saved model -> " << model_path << "\n";
  return 0;
}

struct DecodeArgs {
  std::string model, tokenizer, manifest, out, hyp, features;
  int beam = 0;      // 0: use the checkpoint's configured width
  int max_len = 48;
  int workers = 1;
  bool length_normalize = false;
};

int run_decode(const DecodeArgs& args) {
  const auto container = lasr::ckpt::load(args.model);
  const auto model = lasr::ckpt::load_las_model(args.model);
  check(container.meta.contains("data"),
        "decode: checkpoint carries no feature settings");
  const auto data =
      lasr::train::data_config_from_json(container.meta.at("data"));
  const auto subwords = lasr::tokenizer::load_model(args.tokenizer);
  check(subwords.vocab_size() == model.config().vocab_size,
        "decode: tokenizer has ", subwords.vocab_size(),
        " entries but the model was trained with ",
        model.config().vocab_size);
  const auto manifest = lasr::frontend::read_manifest(args.manifest);

  lasr::decode::BeamSearchOptions opts;
  opts.beam = args.beam > 0 ? args.beam : model.config().beam;
  opts.max_len = args.max_len;
  opts.length_normalize = args.length_normalize;

  std::vector<NBestRecord> records(manifest.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.size()) break;
      const auto feat = features_for(manifest[i], data, args.features);
      const auto stacked = lasr::frontend::stack_frames(feat, data.stack);
      auto hyps = lasr::decode::beam_search(model, stacked.frames, opts);
      for (auto& hyp : hyps) {
        hyp.text = lasr::tokenizer::decode(subwords, hyp.tokens);
        hyp.phoneme_scorable = false;  // no second-pass scores yet
      }
      records[i] = {manifest[i].id, std::move(hyps)};
    }
  };
  const int workers = std::max(1, args.workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  write_nbest(args.out, records);
  if (!args.hyp.empty()) write_hyp_file(args.hyp, records);
  std::cout << "decoded " << records.size() << " utterances -> " << args.out
            << "\n";
  return 0;
}

struct RescoreArgs {
  std::string nbest, manifest, lm, lexicon, scorer, out, hyp, ref;
  double alpha = 1.0, beta = 1.0;
  double grid_step = 0.05;
  bool grid = false;
};

int run_rescore(const RescoreArgs& args) {
  auto records = read_nbest(args.nbest);

  if (!args.lm.empty()) {
    const auto lm = lasr::lm::load_arpa(args.lm);
    for (auto& rec : records) {
      for (auto& hyp : rec.hyps) {
        hyp.lm_score =
            lasr::lm::ngram_score(lm, lasr::tokenizer::split_words(hyp.text));
        hyp.lm_scored = true;
      }
    }
  }

  if (!args.scorer.empty()) {
    check(!args.lexicon.empty() && !args.manifest.empty(),
          "rescore: phoneme scoring needs --lexicon and --manifest");
    const auto container = lasr::ckpt::load(args.scorer);
    const auto scorer = lasr::decode::load_scorer(args.scorer);
    check(container.meta.contains("data"),
          "rescore: scorer checkpoint carries no feature settings");
    const auto data =
        lasr::train::data_config_from_json(container.meta.at("data"));
    const auto lexicon = lasr::tokenizer::load_lexicon(args.lexicon);
    const auto manifest = lasr::frontend::read_manifest(args.manifest);
    std::map<std::string, const lasr::frontend::ManifestEntry*> by_id;
    for (const auto& e : manifest) by_id[e.id] = &e;
    for (auto& rec : records) {
      const auto it = by_id.find(rec.utt_id);
      check(it != by_id.end(), "rescore: utterance ", rec.utt_id,
            " missing from --manifest");
      const auto feat = features_for(*it->second, data, "");
      const auto stacked = lasr::frontend::stack_frames(feat, data.stack);
      for (auto& hyp : rec.hyps) {
        try {
          const auto phones = lasr::tokenizer::to_phonemes(lexicon, hyp.text);
          hyp.phoneme_ctc_score = scorer.score(stacked.frames, phones);
          hyp.phoneme_scorable = true;
        } catch (const Error&) {
          hyp.phoneme_scorable = false;  // beta=1 fusion path
        }
      }
    }
  }

  lasr::decode::FusionWeights weights{args.alpha, args.beta};
  if (args.grid) {
    check(!args.ref.empty(), "rescore: --grid needs --ref references");
    const auto refs = lasr::frontend::read_manifest(args.ref);
    std::map<std::string, std::string> ref_text;
    for (const auto& e : refs) ref_text[e.id] = e.text;
    std::vector<lasr::decode::ValidationUtt> validation;
    for (const auto& rec : records) {
      const auto it = ref_text.find(rec.utt_id);
      check(it != ref_text.end(), "rescore: no reference for ", rec.utt_id);
      validation.push_back({rec.hyps, it->second});
    }
    weights = lasr::decode::grid_search_fusion(validation, args.grid_step);
    std::cout << "grid-searched weights: alpha=" << weights.alpha
              << " beta=" << weights.beta << "\n";
  }

  for (auto& rec : records) lasr::decode::rerank(rec.hyps, weights);
  write_nbest(args.out, records);
  if (!args.hyp.empty()) write_hyp_file(args.hyp, records);
  std::cout << "rescored " << records.size() << " utterances -> " << args.out
            << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string hyp, ref, json_out;
};

int run_evaluate(const EvaluateArgs& args) {
  std::map<std::string, std::string> hyps;
  for (const std::string& line : lasr::util::read_lines(args.hyp)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    hyps[j.at("utt_id").get<std::string>()] = j.at("text").get<std::string>();
  }
  std::vector<lasr::eval::TaggedRef> refs;
  for (const auto& e : lasr::frontend::read_manifest(args.ref))
    refs.push_back({e.id, e.text, e.tag});
  const auto report = lasr::eval::split_report(refs, hyps);
  std::cout << lasr::eval::format_report(report);
  if (!args.json_out.empty()) {
    lasr::util::atomic_write(args.json_out, [&](std::ostream& os) {
      os << lasr::eval::report_to_json(report) << "\n";
    });
  }
  return 0;
}

struct GradcheckArgs {
  double step = 1e-5;
  double tol = 1e-4;
};

int run_gradcheck(const GradcheckArgs& args) {
  const auto checks = lasr::diag::gradient_suite(args.step, args.tol);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
              << "  max rel err " << c.max_rel_err << "\n";
    ok &= c.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attention encoder-decoder speech recognition workbench"};
  app.require_subcommand(1);

  FeaturizeArgs feat_args;
  auto* feat = app.add_subcommand("featurize",
                                  "compute log-mel features for a manifest");
  feat->add_option("--manifest", feat_args.manifest)->required();
  feat->add_option("--out", feat_args.out)->required();
  feat->add_option("--mels", feat_args.n_mels);
  feat->add_option("--window-ms", feat_args.window_ms);
  feat->add_option("--hop-ms", feat_args.hop_ms);
  feat->add_flag("--augment", feat_args.augment);
  feat->add_option("--freq-mask", feat_args.freq_mask);
  feat->add_option("--time-mask", feat_args.time_mask);
  feat->add_option("--masks-per-axis", feat_args.masks_per_axis);
  feat->add_option("--seed", feat_args.seed);

  TokTrainArgs tok_args;
  auto* tok = app.add_subcommand("tokenizer-train",
                                 "train the unigram subword inventory");
  tok->add_option("--manifest", tok_args.manifest);
  tok->add_option("--text", tok_args.text);
  tok->add_option("--out", tok_args.out)->required();
  tok->add_option("--vocab-size", tok_args.vocab_size);
  tok->add_option("--max-piece-len", tok_args.max_piece_len);

  LmTrainArgs lm_args;
  auto* lmt = app.add_subcommand("lm-train", "train the backoff n-gram model");
  lmt->add_option("--text", lm_args.text)->required();
  lmt->add_option("--out", lm_args.out)->required();
  lmt->add_option("--order", lm_args.order);
  lmt->add_option("--discount", lm_args.discount);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "run a training plan");
  train->add_option("--config", train_args.config)->required();
  train->add_option("--out", train_args.out)->required();
  train->add_option("--resume", train_args.resume);
  train->add_option("--seed", train_args.seed)
      ->each([&train_args](const std::string&) { train_args.seed_set = true; });
  train->add_option("--set", train_args.overrides,
                    "override config entries as section.key=value");

  DecodeArgs dec_args;
  auto* dec = app.add_subcommand("decode", "beam-search a manifest");
  dec->add_option("--model", dec_args.model)->required();
  dec->add_option("--tokenizer", dec_args.tokenizer)->required();
  dec->add_option("--manifest", dec_args.manifest)->required();
  dec->add_option("--out", dec_args.out)->required();
  dec->add_option("--hyp", dec_args.hyp);
  dec->add_option("--features", dec_args.features);
  dec->add_option("--beam", dec_args.beam);
  dec->add_option("--max-len", dec_args.max_len);
  dec->add_option("--workers", dec_args.workers);
  dec->add_flag("--length-normalize", dec_args.length_normalize);

  RescoreArgs res_args;
  auto* res = app.add_subcommand("rescore",
                                 "second-pass rescoring of an n-best file");
  res->add_option("--nbest", res_args.nbest)->required();
  res->add_option("--out", res_args.out)->required();
  res->add_option("--hyp", res_args.hyp);
  res->add_option("--lm", res_args.lm);
  res->add_option("--model", res_args.scorer,
                  "phoneme scorer checkpoint");
  res->add_option("--lexicon", res_args.lexicon);
  res->add_option("--manifest", res_args.manifest);
  res->add_option("--alpha", res_args.alpha);
  res->add_option("--beta", res_args.beta);
  res->add_flag("--grid", res_args.grid);
  res->add_option("--grid-step", res_args.grid_step);
  res->add_option("--ref", res_args.ref);

  EvaluateArgs eval_args;
  auto* ev = app.add_subcommand("evaluate", "word error rate report");
  ev->add_option("--hyp", eval_args.hyp)->required();
  ev->add_option("--ref", eval_args.ref)->required();
  ev->add_option("--json", eval_args.json_out);

  GradcheckArgs grad_args;
  auto* grad = app.add_subcommand("gradcheck",
                                  "finite-difference gradient suite");
  grad->add_option("--step", grad_args.step);
  grad->add_option("--tol", grad_args.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(feat)) return run_featurize(feat_args);
    if (app.got_subcommand(tok)) return run_tokenizer_train(tok_args);
    if (app.got_subcommand(lmt)) return run_lm_train(lm_args);
    if (app.got_subcommand(train)) return run_train(train_args);
    if (app.got_subcommand(dec)) return run_decode(dec_args);
    if (app.got_subcommand(res)) return run_rescore(res_args);
    if (app.got_subcommand(ev)) return run_evaluate(eval_args);
    if (app.got_subcommand(grad)) return run_gradcheck(grad_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
