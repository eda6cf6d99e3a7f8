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

#include <vector>

#include "lasr/tape.hpp"

namespace lasr::losses {

// Smoothed target distribution (1-eps) * onehot + eps/K.
ad::Array smoothed_targets(const std::vector<int>& labels, int num_classes,
                           double epsilon);

// Mean over steps of the smoothed cross entropy. step_logits are 1xV rows,
// one per label.
ad::NodeId ce_smoothed(ad::Tape& tape,
                       const std::vector<ad::NodeId>& step_logits,
                       const std::vector<int>& labels, double epsilon);

// True iff the expanded blank-interleaved target fits in `frames` steps.
bool ctc_admissible(int frames, const std::vector<int>& target);

// Negative log marginal probability of `target` under per-frame logits
// (U x (V+1), blank last), summed over all blank/repeat expansions.
// Differentiable with respect to the logits.
ad::NodeId ctc_loss(ad::Tape& tape, ad::NodeId frame_logits,
                    const std::vector<int>& target, int blank);

// Value-only variant used by scoring paths; also returns the gradient with
// respect to the per-frame log-probabilities when grad != nullptr.
double ctc_loss_value(const ad::Array& frame_logits,
                      const std::vector<int>& target, int blank,
                      ad::Array* grad_logprobs = nullptr);

// Probability-weighted mean word errors over the list (the expected-error
// baseline, computed from the current scores and treated as a constant).
double mwer_baseline(const ad::Array& seq_logps,
                     const std::vector<double>& word_errors);

// Expected word errors over softmax-renormalized hypothesis scores, with a
// constant baseline subtracted. seq_logps is a 1xN node.
ad::NodeId mwer_expected_errors(ad::Tape& tape, ad::NodeId seq_logps,
                                const std::vector<double>& word_errors,
                                double baseline);

// Baseline-subtracted expected-error loss with the self-baseline.
ad::NodeId mwer_loss(ad::Tape& tape, ad::NodeId seq_logps,
                     const std::vector<double>& word_errors);

// lambda * ce + (1 - lambda) * ctc.
ad::NodeId joint_loss(ad::Tape& tape, ad::NodeId ce, ad::NodeId ctc,
                      double lambda);

}  // namespace lasr::losses
