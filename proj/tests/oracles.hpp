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

// Brute-force reference implementations used only by tests. Each one is an
// independent route to the same quantity as a production component: direct
// DFT instead of the FFT, full path enumeration instead of forward-backward,
// exhaustive recursion instead of dynamic programming.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lasr/array.hpp"

namespace oracles {

// O(N^2) DFT magnitude-squared spectrum of one (already windowed) frame,
// zero padded to n_fft.
inline std::vector<double> naive_power_spectrum(
    const std::vector<double>& frame, int n_fft) {
  const int bins = n_fft / 2 + 1;
  std::vector<double> power(static_cast<std::size_t>(bins), 0.0);
  for (int k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < frame.size(); ++n) {
      const double ang = -2.0 * M_PI * k * static_cast<double>(n) / n_fft;
      re += frame[n] * std::cos(ang);
      im += frame[n] * std::sin(ang);
    }
    power[static_cast<std::size_t>(k)] = re * re + im * im;
  }
  return power;
}

// Marginal probability of `target` by explicit enumeration of all
// (V+1)^frames alignment paths, collapsing repeats then blanks.
inline double ctc_brute_force(const lasr::ad::Array& probs /* rows sum to 1 */,
                              const std::vector<int>& target, int blank) {
  const int frames = probs.rows;
  const int classes = probs.cols;
  double total = 0.0;
  std::vector<int> path(static_cast<std::size_t>(frames), 0);
  while (true) {
    double p = 1.0;
    for (int t = 0; t < frames; ++t)
      p *= probs.at(t, path[static_cast<std::size_t>(t)]);
    // Collapse: merge repeats, then drop blanks.
    std::vector<int> collapsed;
    for (int t = 0; t < frames; ++t) {
      const int label = path[static_cast<std::size_t>(t)];
      if (t > 0 && label == path[static_cast<std::size_t>(t - 1)]) continue;
      if (label != blank) collapsed.push_back(label);
    }
    if (collapsed == target) total += p;
    // Next path in lexicographic order.
    int pos = frames - 1;
    while (pos >= 0 && path[static_cast<std::size_t>(pos)] == classes - 1) {
      path[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    path[static_cast<std::size_t>(pos)] += 1;
  }
  return total;
}

// Minimal word edit distance by exhaustive recursion (no DP).
inline int edit_distance_brute_force(const std::vector<std::string>& hyp,
                                     const std::vector<std::string>& ref,
                                     std::size_t i = 0, std::size_t j = 0) {
  if (i == hyp.size()) return static_cast<int>(ref.size() - j);
  if (j == ref.size()) return static_cast<int>(hyp.size() - i);
  const int match_cost = hyp[i] == ref[j] ? 0 : 1;
  int best = match_cost + edit_distance_brute_force(hyp, ref, i + 1, j + 1);
  best = std::min(best, 1 + edit_distance_brute_force(hyp, ref, i + 1, j));
  best = std::min(best, 1 + edit_distance_brute_force(hyp, ref, i, j + 1));
  return best;
}

// All segmentations of `chars` into pieces from the inventory; returns the
// best achievable log score (piece scores summed), or -inf if uncoverable.
inline double best_segmentation_score(
    const std::vector<std::string>& chars,
    const std::vector<std::pair<std::string, double>>& pieces,
    std::size_t pos = 0) {
  if (pos == chars.size()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  std::string prefix;
  for (std::size_t end = pos; end < chars.size(); ++end) {
    prefix += chars[end];
    for (const auto& [piece, lp] : pieces) {
      if (piece != prefix) continue;
      const double rest = best_segmentation_score(chars, pieces, end + 1);
      best = std::max(best, lp + rest);
    }
  }
  return best;
}

}  // namespace oracles
