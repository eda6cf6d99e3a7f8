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

#include "lasr/scorer.hpp"

#include <cmath>

#include "lasr/checkpoint.hpp"
#include "lasr/error.hpp"
#include "lasr/losses.hpp"

namespace lasr::decode {

using ad::NodeId;
using ad::Tape;

void ScorerConfig::validate() const {
  check(input_dim >= 1, "ScorerConfig: input_dim must be >= 1");
  check(num_phonemes >= 1, "ScorerConfig: num_phonemes must be >= 1");
  check(layers >= 1 && hidden >= 1, "ScorerConfig: bad stack shape");
}

PhonemeCtcScorer::PhonemeCtcScorer(ScorerConfig cfg, std::uint64_t init_seed)
    : cfg_(cfg) {
  cfg_.validate();
  init_params(init_seed);
}

PhonemeCtcScorer::PhonemeCtcScorer(ScorerConfig cfg, model::ParamStore params)
    : cfg_(cfg), params_(std::move(params)) {
  cfg_.validate();
}

void PhonemeCtcScorer::init_params(std::uint64_t seed) {
  util::Rng rng(seed);
  auto fanin = [&rng](int rows, int cols) {
    const double s = 1.0 / std::sqrt(static_cast<double>(rows));
    return ad::Array::uniform(rows, cols, -s, s, rng);
  };
  int in_dim = cfg_.input_dim;
  for (int layer = 1; layer <= cfg_.layers; ++layer) {
    const std::string prefix = "scorer.l" + std::to_string(layer);
    params_.add(prefix + ".wx", fanin(in_dim, 4 * cfg_.hidden));
    params_.add(prefix + ".wh", fanin(cfg_.hidden, 4 * cfg_.hidden));
    ad::Array b(1, 4 * cfg_.hidden);
    const double s = 1.0 / std::sqrt(static_cast<double>(cfg_.hidden));
    for (auto& v : b.data) v = rng.uniform(-s, s);
    for (int j = cfg_.hidden; j < 2 * cfg_.hidden; ++j)
      b.data[static_cast<std::size_t>(j)] += 1.0;
    params_.add(prefix + ".b", std::move(b));
    in_dim = cfg_.hidden;
  }
  params_.add("scorer.out.w", fanin(cfg_.hidden, cfg_.num_phonemes + 1));
  params_.add("scorer.out.b", ad::Array::zeros(1, cfg_.num_phonemes + 1));
}

model::BoundParams PhonemeCtcScorer::bind(Tape& tape) const {
  model::BoundParams bound;
  for (const auto& [name, value] : params_.items)
    bound.ids[name] = tape.leaf(value);
  return bound;
}

NodeId PhonemeCtcScorer::frame_logits(Tape& t, const model::BoundParams& p,
                                      const ad::Array& feats) const {
  check(feats.rows >= 1, "scorer: empty feature sequence");
  check(feats.cols == cfg_.input_dim, "scorer: feature dim ", feats.cols,
        " != configured input_dim ", cfg_.input_dim);
  const int h = cfg_.hidden;
  NodeId current = t.constant(feats);
  for (int layer = 1; layer <= cfg_.layers; ++layer) {
    const std::string prefix = "scorer.l" + std::to_string(layer);
    const NodeId wx = p.at(prefix + ".wx");
    const NodeId wh = p.at(prefix + ".wh");
    const NodeId bias = p.at(prefix + ".b");
    const NodeId zero = t.constant(ad::Array::zeros(1, h));
    NodeId hs = zero, cs = zero;
    std::vector<NodeId> rows(static_cast<std::size_t>(t.value(current).rows));
    for (int s = 0; s < t.value(current).rows; ++s) {
      const NodeId x = t.slice_rows(current, s, s + 1);
      const NodeId z = t.add_row(t.add(t.matmul(x, wx), t.matmul(hs, wh)),
                                 bias);
      const NodeId gi = t.sigmoid(t.slice_cols(z, 0, h));
      const NodeId gf = t.sigmoid(t.slice_cols(z, h, 2 * h));
      const NodeId gg = t.tanh(t.slice_cols(z, 2 * h, 3 * h));
      const NodeId go = t.sigmoid(t.slice_cols(z, 3 * h, 4 * h));
      cs = t.add(t.mul(gf, cs), t.mul(gi, gg));
      hs = t.mul(go, t.tanh(cs));
      rows[static_cast<std::size_t>(s)] = hs;
    }
    current = t.concat_rows(rows);
  }
  return t.add_row(t.matmul(current, p.at("scorer.out.w")),
                   p.at("scorer.out.b"));
}

double PhonemeCtcScorer::score(const ad::Array& feats,
                               const std::vector<int>& phonemes) const {
  Tape tape;
  const model::BoundParams bound = bind(tape);
  const NodeId logits = frame_logits(tape, bound, feats);
  return -losses::ctc_loss_value(tape.value(logits), phonemes, blank_id());
}

void save_scorer(const std::string& path, const PhonemeCtcScorer& scorer,
                 const nlohmann::json* extra_meta) {
  ckpt::Container c;
  c.kind = "phoneme_ctc";
  nlohmann::json j;
  j["input_dim"] = scorer.config().input_dim;
  j["num_phonemes"] = scorer.config().num_phonemes;
  j["layers"] = scorer.config().layers;
  j["hidden"] = scorer.config().hidden;
  c.meta["config"] = j;
  if (extra_meta) {
    for (auto it = extra_meta->begin(); it != extra_meta->end(); ++it)
      c.meta[it.key()] = it.value();
  }
  c.stores.emplace_back("params", scorer.params());
  ckpt::save(path, c);
}

PhonemeCtcScorer load_scorer(const std::string& path) {
  ckpt::Container c = ckpt::load(path);
  check(c.kind == "phoneme_ctc", "checkpoint: ", path, " holds a '", c.kind,
        "' model, expected 'phoneme_ctc'");
  const auto& j = c.meta.at("config");
  ScorerConfig cfg;
  cfg.input_dim = j.at("input_dim").get<int>();
  cfg.num_phonemes = j.at("num_phonemes").get<int>();
  cfg.layers = j.at("layers").get<int>();
  cfg.hidden = j.at("hidden").get<int>();
  return PhonemeCtcScorer(cfg, c.store("params"));
}

}  // namespace lasr::decode
