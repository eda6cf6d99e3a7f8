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

#include "lasr/diagnostics.hpp"

#include "lasr/gradcheck.hpp"
#include "lasr/losses.hpp"
#include "lasr/model.hpp"

namespace lasr::diag {

namespace {

using ad::Array;
using ad::NodeId;
using ad::Tape;

model::ModelConfig tiny_config(model::AttnKind kind) {
  model::ModelConfig cfg;
  cfg.input_dim = 5;
  cfg.vocab_size = 6;
  cfg.enc_layers = 2;
  cfg.compress_after = {1, 2};
  cfg.enc_hidden = 3;
  cfg.dec_layers = 2;
  cfg.dec_hidden = 4;
  cfg.attn_kind = kind;
  cfg.attn_heads = kind == model::AttnKind::kContent ? 1 : 2;
  cfg.head_size = 5;
  cfg.loc_conv_channels = 2;
  cfg.loc_conv_width = 3;
  cfg.dropout = 0.0;  // finite differences run the deterministic path
  cfg.label_smooth = 0.1;
  return cfg;
}

Array tiny_features(int t_len, int dim, std::uint64_t seed) {
  util::Rng rng(seed);
  return Array::uniform(t_len, dim, -1.0, 1.0, rng);
}

// Full-network check: loss(params) through listener, attention and speller.
ComponentCheck check_full_model(const std::string& name, model::AttnKind kind,
                                bool joint, double step, double tol) {
  const model::ModelConfig cfg = tiny_config(kind);
  const model::LasModel net(cfg, 7);
  const Array feats = tiny_features(8, cfg.input_dim, 11);
  const std::vector<int> targets = {0, 3, 4, 5, 3, 1};  // <sos> ... <eos>
  const std::vector<int> labels(targets.begin() + 1, targets.end());
  const std::vector<int> ctc_targets = {3, 4};  // fits U=2 frames

  std::vector<std::string> names;
  std::vector<Array> leaves;
  for (const auto& [param_name, value] : net.params().items) {
    names.push_back(param_name);
    leaves.push_back(value);
  }

  const ad::GraphBuilder build = [&](Tape& t,
                                     const std::vector<NodeId>& ids) {
    model::BoundParams bound;
    for (std::size_t i = 0; i < names.size(); ++i)
      bound.ids[names[i]] = ids[i];
    const auto fwd = net.forward_teacher(t, bound, feats, targets, 0.0,
                                         model::Mode::kInfer, nullptr);
    const NodeId ce =
        losses::ce_smoothed(t, fwd.step_logits, labels, cfg.label_smooth);
    if (!joint) return ce;
    const NodeId frame_logits =
        net.ctc_frame_logits(t, bound, fwd.encoder_states);
    const NodeId ctc =
        losses::ctc_loss(t, frame_logits, ctc_targets, net.ctc_blank_id());
    return losses::joint_loss(t, ce, ctc, cfg.joint_lambda);
  };

  const auto report = ad::grad_check(build, leaves, step, tol);
  return {name, report.max_rel_err, report.pass};
}

ComponentCheck check_ce(double step, double tol) {
  util::Rng rng(3);
  const Array logits = Array::uniform(4, 5, -1.5, 1.5, rng);
  const std::vector<int> labels = {2, 0, 4, 1};
  const ad::GraphBuilder build = [&](Tape& t,
                                     const std::vector<NodeId>& ids) {
    std::vector<NodeId> rows;
    for (int r = 0; r < 4; ++r) rows.push_back(t.slice_rows(ids[0], r, r + 1));
    return losses::ce_smoothed(t, rows, labels, 0.1);
  };
  const auto report = ad::grad_check(build, {logits}, step, tol);
  return {"ce_smoothed", report.max_rel_err, report.pass};
}

ComponentCheck check_ctc(double step, double tol) {
  util::Rng rng(5);
  const Array logits = Array::uniform(6, 4, -1.0, 1.0, rng);  // blank id 3
  const std::vector<int> target = {0, 2, 2};
  const ad::GraphBuilder build = [&](Tape& t,
                                     const std::vector<NodeId>& ids) {
    return losses::ctc_loss(t, ids[0], target, 3);
  };
  const auto report = ad::grad_check(build, {logits}, step, tol);
  return {"ctc_loss", report.max_rel_err, report.pass};
}

ComponentCheck check_mwer(double step, double tol) {
  const Array logps = Array::row({-1.2, -0.4, -2.5, -0.9});
  const std::vector<double> errors = {1.0, 3.0, 0.0, 2.0};
  // The self-baseline is a constant of the check point, so the finite
  // differences probe the same detached-baseline function as the tape.
  Tape probe;
  const double baseline =
      losses::mwer_baseline(probe.value(probe.leaf(logps)), errors);
  const ad::GraphBuilder build = [&](Tape& t,
                                     const std::vector<NodeId>& ids) {
    return losses::mwer_expected_errors(t, ids[0], errors, baseline);
  };
  const auto report = ad::grad_check(build, {logps}, step, tol);
  return {"mwer_loss", report.max_rel_err, report.pass};
}

}  // namespace

std::vector<ComponentCheck> gradient_suite(double step, double tol) {
  std::vector<ComponentCheck> checks;
  checks.push_back(check_full_model("listener+content+speller",
                                    model::AttnKind::kContent, false, step,
                                    tol));
  checks.push_back(check_full_model("listener+multihead+speller",
                                    model::AttnKind::kMultihead, false, step,
                                    tol));
  checks.push_back(check_full_model("listener+location+speller",
                                    model::AttnKind::kLocation, false, step,
                                    tol));
  checks.push_back(check_ce(step, tol));
  checks.push_back(check_ctc(step, tol));
  checks.push_back(check_mwer(step, tol));
  checks.push_back(check_full_model("joint_ce_ctc", model::AttnKind::kContent,
                                    true, step, tol));
  return checks;
}

bool all_pass(const std::vector<ComponentCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace lasr::diag
