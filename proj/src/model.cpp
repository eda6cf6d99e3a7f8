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

#include "lasr/model.hpp"

#include <algorithm>
#include <cmath>

#include "lasr/error.hpp"
#include "lasr/tokenizer.hpp"

namespace lasr::model {

using ad::NodeId;
using ad::Tape;

std::string attn_kind_name(AttnKind kind) {
  switch (kind) {
    case AttnKind::kContent: return "content";
    case AttnKind::kMultihead: return "multihead";
    case AttnKind::kLocation: return "location";
  }
  fail("attn_kind_name: bad enum value");
}

AttnKind attn_kind_from_name(const std::string& name) {
  if (name == "content") return AttnKind::kContent;
  if (name == "multihead") return AttnKind::kMultihead;
  if (name == "location") return AttnKind::kLocation;
  fail("unknown attention kind '", name,
       "', expected content|multihead|location");
}

void ModelConfig::validate() const {
  check(input_dim >= 1, "ModelConfig: input_dim must be >= 1");
  check(vocab_size > tokenizer::SubwordModel::kNumSpecials,
        "ModelConfig: vocab_size ", vocab_size, " leaves no payload tokens");
  check(enc_layers >= 1 && enc_hidden >= 1, "ModelConfig: bad listener shape");
  check(dec_layers >= 1 && dec_hidden >= 1, "ModelConfig: bad speller shape");
  check(attn_heads >= 1, "ModelConfig: attn_heads must be >= 1");
  check(head_size >= 1, "ModelConfig: head_size must be >= 1");
  check(attn_kind != AttnKind::kContent || attn_heads == 1,
        "ModelConfig: content attention is single-head; use multihead for ",
        attn_heads, " heads");
  check(attn_kind != AttnKind::kMultihead || attn_heads >= 2,
        "ModelConfig: multihead attention needs attn_heads >= 2");
  check(loc_conv_channels >= 1 && loc_conv_width >= 1 &&
            loc_conv_width % 2 == 1,
        "ModelConfig: location filters need >= 1 channels and odd width");
  check(dropout >= 0.0 && dropout < 1.0, "ModelConfig: dropout ", dropout,
        " outside [0, 1)");
  check(label_smooth >= 0.0 && label_smooth < 1.0,
        "ModelConfig: label_smooth outside [0, 1)");
  check(joint_lambda >= 0.0 && joint_lambda <= 1.0,
        "ModelConfig: joint_lambda outside [0, 1]");
  check(mwer_lambda >= 0.0, "ModelConfig: mwer_lambda must be >= 0");
  check(ss_rate >= 0.0 && ss_max >= 0.0 && ss_max <= 1.0 &&
            ss_start_epoch >= 0,
        "ModelConfig: bad scheduled-sampling settings");
  check(beam >= 1, "ModelConfig: beam must be >= 1");
  std::vector<int> stages = compress_after;
  std::sort(stages.begin(), stages.end());
  check(std::adjacent_find(stages.begin(), stages.end()) == stages.end(),
        "ModelConfig: duplicate compress_after entries");
  for (int s : stages)
    check(s >= 1 && s <= enc_layers, "ModelConfig: compress_after entry ", s,
          " outside 1..", enc_layers);
}

int ModelConfig::enc_out_dim() const {
  const bool last_compressed =
      std::find(compress_after.begin(), compress_after.end(), enc_layers) !=
      compress_after.end();
  return 2 * enc_hidden * (last_compressed ? 2 : 1);
}

int ModelConfig::context_dim() const {
  return per_head_projection() ? attn_heads * head_size : enc_out_dim();
}

int ModelConfig::encoder_len(int t) const {
  int u = t;
  for (std::size_t i = 0; i < compress_after.size(); ++i) u = (u + 1) / 2;
  return u;
}

void ParamStore::add(const std::string& name, ad::Array value) {
  check(!has(name), "ParamStore: duplicate parameter ", name);
  index[name] = static_cast<int>(items.size());
  items.emplace_back(name, std::move(value));
}

ad::Array& ParamStore::get(const std::string& name) {
  const auto it = index.find(name);
  check(it != index.end(), "ParamStore: unknown parameter ", name);
  return items[static_cast<std::size_t>(it->second)].second;
}

const ad::Array& ParamStore::get(const std::string& name) const {
  const auto it = index.find(name);
  check(it != index.end(), "ParamStore: unknown parameter ", name);
  return items[static_cast<std::size_t>(it->second)].second;
}

NodeId BoundParams::at(const std::string& name) const {
  const auto it = ids.find(name);
  check(it != ids.end(), "BoundParams: parameter ", name,
        " not bound to this tape");
  return it->second;
}

void validate_targets(const std::vector<int>& targets, int vocab_size) {
  check(targets.size() >= 2, "targets: need at least <sos> and <eos>");
  check(targets.front() == tokenizer::SubwordModel::kSos,
        "targets: must begin with <sos>");
  check(targets.back() == tokenizer::SubwordModel::kEos,
        "targets: must end with <eos>");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    check(targets[i] >= 0 && targets[i] < vocab_size,
          "targets: token id ", targets[i], " out of range at position ", i);
    check(i + 1 == targets.size() || targets[i] != tokenizer::SubwordModel::kEos,
          "targets: <eos> before the final position");
  }
}

namespace {

// Uniform init scaled by fan-in; the forget gate bias starts at one.
ad::Array lstm_bias(int hidden, util::Rng& rng) {
  ad::Array b(1, 4 * hidden);
  const double s = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& v : b.data) v = rng.uniform(-s, s);
  for (int j = hidden; j < 2 * hidden; ++j) b.data[static_cast<std::size_t>(j)] += 1.0;
  return b;
}

ad::Array fanin_uniform(int rows, int cols, util::Rng& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(rows));
  return ad::Array::uniform(rows, cols, -s, s, rng);
}

struct LstmParamNames {
  std::string wx, wh, b;
};

LstmParamNames lstm_names(const std::string& prefix) {
  return {prefix + ".wx", prefix + ".wh", prefix + ".b"};
}

// One recurrence step; gate order [input, forget, cell, output].
std::pair<NodeId, NodeId> lstm_cell(Tape& t, NodeId x, NodeId h, NodeId c,
                                    NodeId wx, NodeId wh, NodeId b,
                                    int hidden) {
  const NodeId z = t.add_row(t.add(t.matmul(x, wx), t.matmul(h, wh)), b);
  const NodeId gi = t.sigmoid(t.slice_cols(z, 0, hidden));
  const NodeId gf = t.sigmoid(t.slice_cols(z, hidden, 2 * hidden));
  const NodeId gg = t.tanh(t.slice_cols(z, 2 * hidden, 3 * hidden));
  const NodeId go = t.sigmoid(t.slice_cols(z, 3 * hidden, 4 * hidden));
  const NodeId c2 = t.add(t.mul(gf, c), t.mul(gi, gg));
  const NodeId h2 = t.mul(go, t.tanh(c2));
  return {h2, c2};
}

}  // namespace

LasModel::LasModel(ModelConfig cfg, std::uint64_t init_seed)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  init_params(init_seed);
}

LasModel::LasModel(ModelConfig cfg, ParamStore params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
}

void LasModel::init_params(std::uint64_t seed) {
  util::Rng rng(seed);
  const int h = cfg_.enc_hidden;
  int in_dim = cfg_.input_dim;
  for (int layer = 1; layer <= cfg_.enc_layers; ++layer) {
    for (const char* dir : {"fw", "bw"}) {
      const auto names =
          lstm_names("enc.l" + std::to_string(layer) + "." + dir);
      params_.add(names.wx, fanin_uniform(in_dim, 4 * h, rng));
      params_.add(names.wh, fanin_uniform(h, 4 * h, rng));
      params_.add(names.b, lstm_bias(h, rng));
    }
    const std::string ln = "enc.l" + std::to_string(layer) + ".ln";
    params_.add(ln + ".g", ad::Array::full(1, 2 * h, 1.0));
    params_.add(ln + ".b", ad::Array::zeros(1, 2 * h));
    in_dim = 2 * h;
    if (std::find(cfg_.compress_after.begin(), cfg_.compress_after.end(),
                  layer) != cfg_.compress_after.end()) {
      in_dim *= 2;
    }
  }

  const int enc_out = cfg_.enc_out_dim();
  const int attn_dim = cfg_.head_size;
  for (int head = 0; head < cfg_.attn_heads; ++head) {
    const std::string prefix = "attn.h" + std::to_string(head);
    params_.add(prefix + ".w1", fanin_uniform(cfg_.dec_hidden, attn_dim, rng));
    params_.add(prefix + ".w2", fanin_uniform(enc_out, attn_dim, rng));
    params_.add(prefix + ".v", fanin_uniform(attn_dim, 1, rng));
    params_.add(prefix + ".b", ad::Array::zeros(1, attn_dim));
    if (cfg_.attn_kind == AttnKind::kLocation) {
      params_.add(prefix + ".f",
                  fanin_uniform(cfg_.loc_conv_channels, cfg_.loc_conv_width,
                                rng));
      params_.add(prefix + ".w3",
                  fanin_uniform(cfg_.loc_conv_channels, attn_dim, rng));
    }
    if (cfg_.per_head_projection()) {
      params_.add(prefix + ".z", fanin_uniform(enc_out, cfg_.head_size, rng));
      params_.add(prefix + ".zb", ad::Array::zeros(1, cfg_.head_size));
    }
  }

  params_.add("embed",
              fanin_uniform(cfg_.vocab_size, cfg_.embed_dim(), rng));
  int dec_in = cfg_.embed_dim() + cfg_.context_dim();
  for (int layer = 1; layer <= cfg_.dec_layers; ++layer) {
    const auto names = lstm_names("dec.l" + std::to_string(layer));
    params_.add(names.wx, fanin_uniform(dec_in, 4 * cfg_.dec_hidden, rng));
    params_.add(names.wh,
                fanin_uniform(cfg_.dec_hidden, 4 * cfg_.dec_hidden, rng));
    params_.add(names.b, lstm_bias(cfg_.dec_hidden, rng));
    dec_in = cfg_.dec_hidden;
  }
  params_.add("dec.ln.g", ad::Array::full(1, cfg_.dec_hidden, 1.0));
  params_.add("dec.ln.b", ad::Array::zeros(1, cfg_.dec_hidden));

  params_.add("out.w", fanin_uniform(cfg_.dec_hidden + cfg_.context_dim(),
                                     cfg_.vocab_size, rng));
  params_.add("out.b", ad::Array::zeros(1, cfg_.vocab_size));

  params_.add("ctc.w", fanin_uniform(enc_out, cfg_.vocab_size + 1, rng));
  params_.add("ctc.b", ad::Array::zeros(1, cfg_.vocab_size + 1));
}

BoundParams LasModel::bind(Tape& tape) const {
  BoundParams bound;
  for (const auto& [name, value] : params_.items)
    bound.ids[name] = tape.leaf(value);
  return bound;
}

NodeId LasModel::listen(Tape& t, const BoundParams& p, const ad::Array& feats,
                        Mode mode, util::Rng* dropout_rng) const {
  check(feats.rows >= 1, "listen: empty feature sequence");
  check(feats.cols == cfg_.input_dim, "listen: feature dim ", feats.cols,
        " != configured input_dim ", cfg_.input_dim);
  check(mode == Mode::kInfer || cfg_.dropout == 0.0 || dropout_rng != nullptr,
        "listen: train mode with dropout needs an RNG stream");

  const int h = cfg_.enc_hidden;
  const double keep = 1.0 - cfg_.dropout;
  NodeId current = t.constant(feats);
  for (int layer = 1; layer <= cfg_.enc_layers; ++layer) {
    const int steps = t.value(current).rows;
    const auto fw_names =
        lstm_names("enc.l" + std::to_string(layer) + ".fw");
    const auto bw_names =
        lstm_names("enc.l" + std::to_string(layer) + ".bw");
    const NodeId zero = t.constant(ad::Array::zeros(1, h));

    std::vector<NodeId> fw_steps(static_cast<std::size_t>(steps));
    NodeId hs = zero, cs = zero;
    for (int s = 0; s < steps; ++s) {
      const NodeId x = t.slice_rows(current, s, s + 1);
      std::tie(hs, cs) = lstm_cell(t, x, hs, cs, p.at(fw_names.wx),
                                   p.at(fw_names.wh), p.at(fw_names.b), h);
      fw_steps[static_cast<std::size_t>(s)] = hs;
    }
    std::vector<NodeId> bw_steps(static_cast<std::size_t>(steps));
    hs = zero;
    cs = zero;
    for (int s = steps - 1; s >= 0; --s) {
      const NodeId x = t.slice_rows(current, s, s + 1);
      std::tie(hs, cs) = lstm_cell(t, x, hs, cs, p.at(bw_names.wx),
                                   p.at(bw_names.wh), p.at(bw_names.b), h);
      bw_steps[static_cast<std::size_t>(s)] = hs;
    }
    std::vector<NodeId> rows(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s)
      rows[static_cast<std::size_t>(s)] =
          t.concat_cols({fw_steps[static_cast<std::size_t>(s)],
                         bw_steps[static_cast<std::size_t>(s)]});
    NodeId out = t.concat_rows(rows);

    const std::string ln = "enc.l" + std::to_string(layer) + ".ln";
    out = t.layer_norm(out, p.at(ln + ".g"), p.at(ln + ".b"));
    if (mode == Mode::kTrain && cfg_.dropout > 0.0)
      out = t.dropout(out, keep, *dropout_rng);

    if (std::find(cfg_.compress_after.begin(), cfg_.compress_after.end(),
                  layer) != cfg_.compress_after.end()) {
      int len = t.value(out).rows;
      if (len % 2 == 1) {
        const NodeId pad = t.constant(ad::Array::zeros(1, 2 * h));
        out = t.concat_rows({out, pad});
        len += 1;
      }
      std::vector<NodeId> pairs(static_cast<std::size_t>(len / 2));
      for (int s = 0; s < len / 2; ++s) {
        pairs[static_cast<std::size_t>(s)] =
            t.concat_cols({t.slice_rows(out, 2 * s, 2 * s + 1),
                           t.slice_rows(out, 2 * s + 1, 2 * s + 2)});
      }
      out = t.concat_rows(pairs);
    }
    current = out;
  }
  return current;
}

AttentionOutput LasModel::attend(Tape& t, const BoundParams& p, NodeId query,
                                 NodeId enc, NodeId prev_alignment) const {
  const int u_len = t.value(enc).rows;
  if (cfg_.attn_kind == AttnKind::kLocation) {
    check(t.value(prev_alignment).rows == cfg_.attn_heads &&
              t.value(prev_alignment).cols == u_len,
          "attend: previous alignment shape ",
          t.value(prev_alignment).shape_str(), " does not match ",
          cfg_.attn_heads, "x", u_len);
  }

  std::vector<NodeId> aligns, energies, contexts;
  for (int head = 0; head < cfg_.attn_heads; ++head) {
    const std::string prefix = "attn.h" + std::to_string(head);
    NodeId pre = t.add_row(t.matmul(enc, p.at(prefix + ".w2")),
                           t.matmul(query, p.at(prefix + ".w1")));
    pre = t.add_row(pre, p.at(prefix + ".b"));
    if (cfg_.attn_kind == AttnKind::kLocation) {
      const NodeId head_align = t.slice_rows(prev_alignment, head, head + 1);
      const NodeId conv = t.conv1d_same(head_align, p.at(prefix + ".f"));
      pre = t.add(pre, t.matmul(t.transpose(conv), p.at(prefix + ".w3")));
    }
    const NodeId energy =
        t.transpose(t.matmul(t.tanh(pre), p.at(prefix + ".v")));  // 1 x U
    const NodeId align = t.softmax_rows(energy);
    NodeId ctx;
    if (cfg_.per_head_projection()) {
      const NodeId projected = t.add_row(t.matmul(enc, p.at(prefix + ".z")),
                                         p.at(prefix + ".zb"));
      ctx = t.matmul(align, projected);
    } else {
      ctx = t.matmul(align, enc);
    }
    energies.push_back(energy);
    aligns.push_back(align);
    contexts.push_back(ctx);
  }
  AttentionOutput out;
  out.energies = t.concat_rows(energies);
  out.alignment = t.concat_rows(aligns);
  out.context = t.concat_cols(contexts);
  return out;
}

SpellState LasModel::initial_state(Tape& t, int enc_len) const {
  SpellState state;
  for (int layer = 0; layer < cfg_.dec_layers; ++layer) {
    state.layers.emplace_back(t.constant(ad::Array::zeros(1, cfg_.dec_hidden)),
                              t.constant(ad::Array::zeros(1, cfg_.dec_hidden)));
  }
  state.context = t.constant(ad::Array::zeros(1, cfg_.context_dim()));
  ad::Array onehot = ad::Array::zeros(cfg_.attn_heads, enc_len);
  for (int headIdx = 0; headIdx < cfg_.attn_heads; ++headIdx)
    onehot.at(headIdx, 0) = 1.0;
  state.alignment = t.constant(onehot);
  return state;
}

std::pair<SpellState, NodeId> LasModel::spell_step(Tape& t,
                                                   const BoundParams& p,
                                                   const SpellState& state,
                                                   int y_prev, NodeId enc,
                                                   Mode mode,
                                                   util::Rng* dropout_rng) const {
  check(y_prev >= 0 && y_prev < cfg_.vocab_size, "spell_step: token id ",
        y_prev, " out of range for vocab ", cfg_.vocab_size);
  check(mode == Mode::kInfer || cfg_.dropout == 0.0 || dropout_rng != nullptr,
        "spell_step: train mode with dropout needs an RNG stream");

  const NodeId emb = t.slice_rows(p.at("embed"), y_prev, y_prev + 1);
  NodeId x = t.concat_cols({emb, state.context});

  SpellState next = state;
  for (int layer = 0; layer < cfg_.dec_layers; ++layer) {
    const auto names = lstm_names("dec.l" + std::to_string(layer + 1));
    auto [hs, cs] =
        lstm_cell(t, x, state.layers[static_cast<std::size_t>(layer)].first,
                  state.layers[static_cast<std::size_t>(layer)].second,
                  p.at(names.wx), p.at(names.wh), p.at(names.b),
                  cfg_.dec_hidden);
    next.layers[static_cast<std::size_t>(layer)] = {hs, cs};
    x = hs;
  }
  // One normalization+dropout block on the top recurrent output, ahead of
  // the dense projection.
  NodeId query = t.layer_norm(x, p.at("dec.ln.g"), p.at("dec.ln.b"));
  if (mode == Mode::kTrain && cfg_.dropout > 0.0)
    query = t.dropout(query, 1.0 - cfg_.dropout, *dropout_rng);

  const AttentionOutput att = attend(t, p, query, enc, state.alignment);
  next.context = att.context;
  next.alignment = att.alignment;

  const NodeId logits = t.add_row(
      t.matmul(t.concat_cols({query, att.context}), p.at("out.w")),
      p.at("out.b"));
  return {next, logits};
}

TeacherForwardResult LasModel::forward_teacher(Tape& t, const BoundParams& p,
                                               const ad::Array& feats,
                                               const std::vector<int>& targets,
                                               double ss_prob, Mode mode,
                                               util::Rng* rng) const {
  check(ss_prob >= 0.0 && ss_prob <= 1.0, "forward_teacher: ss_prob ",
        ss_prob, " outside [0, 1]");
  check(ss_prob == 0.0 || rng != nullptr,
        "forward_teacher: scheduled sampling needs an RNG stream");
  validate_targets(targets, cfg_.vocab_size);

  TeacherForwardResult result;
  result.encoder_states = listen(t, p, feats, mode, rng);
  const int enc_len = t.value(result.encoder_states).rows;
  SpellState state = initial_state(t, enc_len);

  const int steps = static_cast<int>(targets.size()) - 1;
  for (int i = 0; i < steps; ++i) {
    int input_token = targets[static_cast<std::size_t>(i)];
    if (i > 0) {
      result.eligible_steps += 1;
      if (ss_prob > 0.0 && rng->bernoulli(ss_prob)) {
        result.sampled_steps += 1;
        const ad::Array& prev = t.value(result.step_logits.back());
        int best = 0;
        for (int k = 1; k < prev.cols; ++k)
          if (prev.data[static_cast<std::size_t>(k)] >
              prev.data[static_cast<std::size_t>(best)])
            best = k;
        input_token = best;
      }
    }
    auto [next, logits] = spell_step(t, p, state, input_token,
                                     result.encoder_states, mode, rng);
    state = next;
    result.step_logits.push_back(logits);
  }
  return result;
}

NodeId LasModel::score_sequence(Tape& t, const BoundParams& p, NodeId enc,
                                const std::vector<int>& targets) const {
  validate_targets(targets, cfg_.vocab_size);
  const int enc_len = t.value(enc).rows;
  SpellState state = initial_state(t, enc_len);
  std::vector<NodeId> picked;
  const int steps = static_cast<int>(targets.size()) - 1;
  for (int i = 0; i < steps; ++i) {
    auto [next, logits] = spell_step(t, p, state,
                                     targets[static_cast<std::size_t>(i)], enc,
                                     Mode::kInfer, nullptr);
    state = next;
    const NodeId logp = t.log_softmax_rows(logits);
    const int label = targets[static_cast<std::size_t>(i + 1)];
    picked.push_back(t.slice_cols(logp, label, label + 1));
  }
  return t.sum_all(t.concat_cols(picked));
}

NodeId LasModel::ctc_frame_logits(Tape& t, const BoundParams& p,
                                  NodeId enc) const {
  return t.add_row(t.matmul(enc, p.at("ctc.w")), p.at("ctc.b"));
}

}  // namespace lasr::model
