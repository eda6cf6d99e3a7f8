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

#include "lasr/losses.hpp"

#include <cmath>
#include <limits>

#include "lasr/error.hpp"

namespace lasr::losses {

using ad::Array;
using ad::NodeId;
using ad::Tape;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

Array log_softmax_rows_value(const Array& logits) {
  Array out = logits;
  for (int i = 0; i < out.rows; ++i) {
    double* row = &out.data[static_cast<std::size_t>(i) * out.cols];
    double mx = row[0];
    for (int j = 1; j < out.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < out.cols; ++j) sum += std::exp(row[j] - mx);
    const double lse = mx + std::log(sum);
    for (int j = 0; j < out.cols; ++j) row[j] -= lse;
  }
  return out;
}

// -log p(target | log_probs) via forward-backward over the blank-interleaved
// state sequence; fills grad with d(loss)/d(log_prob) when requested.
double ctc_from_logprobs(const Array& lp, const std::vector<int>& target,
                         int blank, Array* grad) {
  const int frames = lp.rows;
  const int labels = static_cast<int>(target.size());
  const int states = 2 * labels + 1;

  auto state_label = [&](int s) {
    return (s % 2 == 0) ? blank : target[static_cast<std::size_t>(s / 2)];
  };
  auto can_skip = [&](int s) {
    // A jump s-2 -> s lands on a non-blank label distinct from the previous
    // non-blank one.
    return s >= 2 && s % 2 == 1 &&
           state_label(s) != state_label(s - 2);
  };

  std::vector<double> alpha(static_cast<std::size_t>(frames) * states,
                            kNegInf);
  std::vector<double> beta(static_cast<std::size_t>(frames) * states, kNegInf);
  auto a = [&](int t, int s) -> double& {
    return alpha[static_cast<std::size_t>(t) * states + s];
  };
  auto b = [&](int t, int s) -> double& {
    return beta[static_cast<std::size_t>(t) * states + s];
  };

  a(0, 0) = lp.at(0, state_label(0));
  if (states > 1) a(0, 1) = lp.at(0, state_label(1));
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = logsumexp2(acc, a(t - 1, s - 1));
      if (can_skip(s)) acc = logsumexp2(acc, a(t - 1, s - 2));
      if (acc != kNegInf) a(t, s) = acc + lp.at(t, state_label(s));
    }
  }
  double log_p = a(frames - 1, states - 1);
  if (states > 1) log_p = logsumexp2(log_p, a(frames - 1, states - 2));
  check(log_p != kNegInf,
        "ctc_loss: target has zero probability (", labels, " labels in ",
        frames, " frames)");

  if (grad) {
    b(frames - 1, states - 1) = 0.0;
    if (states > 1) b(frames - 1, states - 2) = 0.0;
    for (int t = frames - 2; t >= 0; --t) {
      for (int s = 0; s < states; ++s) {
        double acc = b(t + 1, s) == kNegInf
                         ? kNegInf
                         : b(t + 1, s) + lp.at(t + 1, state_label(s));
        if (s + 1 < states && b(t + 1, s + 1) != kNegInf)
          acc = logsumexp2(acc,
                           b(t + 1, s + 1) + lp.at(t + 1, state_label(s + 1)));
        if (s + 2 < states && can_skip(s + 2) && b(t + 1, s + 2) != kNegInf)
          acc = logsumexp2(acc,
                           b(t + 1, s + 2) + lp.at(t + 1, state_label(s + 2)));
        b(t, s) = acc;
      }
    }
    *grad = Array::zeros(lp.rows, lp.cols);
    for (int t = 0; t < frames; ++t) {
      // Posterior mass per vocabulary entry at this frame.
      std::vector<double> occ(static_cast<std::size_t>(lp.cols), kNegInf);
      for (int s = 0; s < states; ++s) {
        if (a(t, s) == kNegInf || b(t, s) == kNegInf) continue;
        const int k = state_label(s);
        occ[static_cast<std::size_t>(k)] =
            logsumexp2(occ[static_cast<std::size_t>(k)], a(t, s) + b(t, s));
      }
      for (int k = 0; k < lp.cols; ++k) {
        if (occ[static_cast<std::size_t>(k)] == kNegInf) continue;
        grad->at(t, k) = -std::exp(occ[static_cast<std::size_t>(k)] - log_p);
      }
    }
  }
  return -log_p;
}

}  // namespace

Array smoothed_targets(const std::vector<int>& labels, int num_classes,
                       double epsilon) {
  check(epsilon >= 0.0 && epsilon < 1.0, "smoothed_targets: epsilon ",
        epsilon, " outside [0, 1)");
  Array q(static_cast<int>(labels.size()), num_classes);
  const double floor = epsilon / num_classes;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check(labels[i] >= 0 && labels[i] < num_classes,
          "smoothed_targets: label ", labels[i], " out of range");
    for (int k = 0; k < num_classes; ++k)
      q.at(static_cast<int>(i), k) = floor;
    q.at(static_cast<int>(i), labels[i]) += 1.0 - epsilon;
  }
  return q;
}

NodeId ce_smoothed(Tape& t, const std::vector<NodeId>& step_logits,
                   const std::vector<int>& labels, double epsilon) {
  check(!step_logits.empty(), "ce_smoothed: no logits");
  check(step_logits.size() == labels.size(), "ce_smoothed: ",
        step_logits.size(), " logit rows vs ", labels.size(), " labels");
  const NodeId logits = t.concat_rows(step_logits);
  const int num_classes = t.value(logits).cols;
  const NodeId q = t.constant(smoothed_targets(labels, num_classes, epsilon));
  const NodeId logp = t.log_softmax_rows(logits);
  const double inv_steps = 1.0 / static_cast<double>(labels.size());
  return t.scale(t.sum_all(t.mul(q, logp)), -inv_steps);
}

bool ctc_admissible(int frames, const std::vector<int>& target) {
  int required = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++required;  // repeat needs a blank gap
  return frames >= required;
}

NodeId ctc_loss(Tape& t, NodeId frame_logits, const std::vector<int>& target,
                int blank) {
  const Array& logits = t.value(frame_logits);
  check(blank >= 0 && blank < logits.cols, "ctc_loss: blank id ", blank,
        " out of range for ", logits.cols, " classes");
  for (int label : target) {
    check(label >= 0 && label < logits.cols && label != blank,
          "ctc_loss: bad target label ", label);
  }
  check(ctc_admissible(logits.rows, target),
        "ctc_loss: target of length ", target.size(),
        " (plus repeat separators) does not fit in ", logits.rows, " frames");

  const NodeId logp = t.log_softmax_rows(frame_logits);
  Array grad;
  const double value = ctc_from_logprobs(t.value(logp), target, blank, &grad);
  return t.custom_scalar({logp}, value, {std::move(grad)}, "ctc_loss");
}

double ctc_loss_value(const Array& frame_logits, const std::vector<int>& target,
                      int blank, Array* grad_logprobs) {
  check(blank >= 0 && blank < frame_logits.cols, "ctc_loss: blank id ", blank,
        " out of range for ", frame_logits.cols, " classes");
  for (int label : target) {
    check(label >= 0 && label < frame_logits.cols && label != blank,
          "ctc_loss: bad target label ", label);
  }
  check(ctc_admissible(frame_logits.rows, target),
        "ctc_loss: target of length ", target.size(),
        " (plus repeat separators) does not fit in ", frame_logits.rows,
        " frames");
  return ctc_from_logprobs(log_softmax_rows_value(frame_logits), target, blank,
                           grad_logprobs);
}

double mwer_baseline(const Array& seq_logps,
                     const std::vector<double>& word_errors) {
  check(seq_logps.rows == 1 &&
            seq_logps.cols == static_cast<int>(word_errors.size()),
        "mwer_baseline: scores ", seq_logps.shape_str(), " vs ",
        word_errors.size(), " error counts");
  double mx = seq_logps.data[0];
  for (double v : seq_logps.data) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : seq_logps.data) z += std::exp(v - mx);
  double mean = 0.0;
  for (std::size_t i = 0; i < word_errors.size(); ++i)
    mean += std::exp(seq_logps.data[i] - mx) / z * word_errors[i];
  return mean;
}

NodeId mwer_expected_errors(Tape& t, NodeId seq_logps,
                            const std::vector<double>& word_errors,
                            double baseline) {
  check(word_errors.size() >= 2, "mwer_loss: need at least 2 hypotheses, got ",
        word_errors.size());
  const Array& scores = t.value(seq_logps);
  check(scores.rows == 1 &&
            scores.cols == static_cast<int>(word_errors.size()),
        "mwer_loss: scores ", scores.shape_str(), " vs ", word_errors.size(),
        " error counts");
  const int count = static_cast<int>(word_errors.size());
  std::vector<double> centered(word_errors.size());
  for (std::size_t i = 0; i < word_errors.size(); ++i)
    centered[i] = word_errors[i] - baseline;
  const NodeId probs = t.softmax_rows(seq_logps);
  const NodeId weights = t.constant(Array(1, count, std::move(centered)));
  return t.sum_all(t.mul(probs, weights));
}

NodeId mwer_loss(Tape& t, NodeId seq_logps,
                 const std::vector<double>& word_errors) {
  const double baseline = mwer_baseline(t.value(seq_logps), word_errors);
  return mwer_expected_errors(t, seq_logps, word_errors, baseline);
}

NodeId joint_loss(Tape& t, NodeId ce, NodeId ctc, double lambda) {
  check(lambda >= 0.0 && lambda <= 1.0, "joint_loss: lambda ", lambda,
        " outside [0, 1]");
  return t.add(t.scale(ce, lambda), t.scale(ctc, 1.0 - lambda));
}

}  // namespace lasr::losses
