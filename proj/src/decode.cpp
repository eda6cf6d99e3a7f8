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

#include "lasr/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lasr/error.hpp"
#include "lasr/eval.hpp"

namespace lasr::decode {

using ad::NodeId;
using ad::Tape;
using tokenizer::SubwordModel;

namespace {

struct LiveHyp {
  std::vector<int> tokens;
  double score = 0.0;
  model::SpellState state;
};

struct Candidate {
  int parent = 0;
  int token = 0;
  double score = 0.0;
};

}  // namespace

std::vector<Hypothesis> beam_search(const model::LasModel& m,
                                    const ad::Array& feats,
                                    const BeamSearchOptions& opts) {
  check(opts.beam >= 1, "beam_search: beam must be >= 1");
  check(opts.max_len >= 1, "beam_search: max_len must be >= 1");
  check(feats.rows >= 1, "beam_search: empty features");

  Tape tape;
  const model::BoundParams bound = m.bind(tape);
  const NodeId enc =
      m.listen(tape, bound, feats, model::Mode::kInfer, nullptr);
  const int enc_len = tape.value(enc).rows;
  const int vocab = m.config().vocab_size;

  auto rank_score = [&opts](double score, std::size_t len) {
    return opts.length_normalize ? score / static_cast<double>(len + 1)
                                 : score;
  };

  std::vector<LiveHyp> live;
  live.push_back({{}, 0.0, m.initial_state(tape, enc_len)});
  std::vector<Hypothesis> completed;

  for (int step = 0; step < opts.max_len && !live.empty(); ++step) {
    if (static_cast<int>(completed.size()) >= opts.beam) break;

    std::vector<model::SpellState> next_states;
    next_states.reserve(live.size());
    std::vector<Candidate> candidates;
    candidates.reserve(live.size() * static_cast<std::size_t>(vocab));
    for (std::size_t h = 0; h < live.size(); ++h) {
      const int prev =
          live[h].tokens.empty() ? SubwordModel::kSos : live[h].tokens.back();
      auto [state, logits] = m.spell_step(tape, bound, live[h].state, prev,
                                          enc, model::Mode::kInfer, nullptr);
      next_states.push_back(state);
      const NodeId logp = tape.log_softmax_rows(logits);
      const ad::Array& row = tape.value(logp);
      for (int k = 0; k < vocab; ++k) {
        if (k == SubwordModel::kSos) continue;  // never re-emit <sos>
        candidates.push_back({static_cast<int>(h), k,
                              live[h].score +
                                  row.data[static_cast<std::size_t>(k)]});
      }
    }

    // Top `beam` candidates overall; <eos> entries complete, others live on.
    const std::size_t keep =
        std::min(candidates.size(), static_cast<std::size_t>(opts.beam));
    std::partial_sort(
        candidates.begin(),
        candidates.begin() + static_cast<std::ptrdiff_t>(keep),
        candidates.end(), [&](const Candidate& a, const Candidate& b) {
          const double ra =
              rank_score(a.score, live[static_cast<std::size_t>(a.parent)]
                                      .tokens.size());
          const double rb =
              rank_score(b.score, live[static_cast<std::size_t>(b.parent)]
                                      .tokens.size());
          if (ra != rb) return ra > rb;
          if (a.token != b.token) return a.token < b.token;
          return a.parent < b.parent;
        });

    std::vector<LiveHyp> next_live;
    for (std::size_t c = 0; c < keep; ++c) {
      const Candidate& cand = candidates[c];
      const LiveHyp& parent = live[static_cast<std::size_t>(cand.parent)];
      if (cand.token == SubwordModel::kEos) {
        Hypothesis done;
        done.tokens = parent.tokens;
        done.las_score = cand.score;
        done.complete = true;
        completed.push_back(std::move(done));
      } else {
        LiveHyp child;
        child.tokens = parent.tokens;
        child.tokens.push_back(cand.token);
        child.score = cand.score;
        child.state = next_states[static_cast<std::size_t>(cand.parent)];
        next_live.push_back(std::move(child));
      }
    }
    live = std::move(next_live);
  }

  auto by_score = [&rank_score](const Hypothesis& a, const Hypothesis& b) {
    const double ra = rank_score(a.las_score, a.tokens.size());
    const double rb = rank_score(b.las_score, b.tokens.size());
    if (ra != rb) return ra > rb;
    return a.tokens < b.tokens;
  };
  std::sort(completed.begin(), completed.end(), by_score);
  if (static_cast<int>(completed.size()) > opts.beam)
    completed.resize(static_cast<std::size_t>(opts.beam));

  if (completed.empty()) {
    // Nothing emitted <eos> within max_len; fall back to the best live
    // prefix so the decoder always returns a hypothesis.
    check(!live.empty(), "beam_search: no hypotheses at all");
    const auto best = std::max_element(
        live.begin(), live.end(), [&](const LiveHyp& a, const LiveHyp& b) {
          return rank_score(a.score, a.tokens.size()) <
                 rank_score(b.score, b.tokens.size());
        });
    Hypothesis h;
    h.tokens = best->tokens;
    h.las_score = best->score;
    h.complete = false;
    completed.push_back(std::move(h));
  }
  return completed;
}

double fuse(const Hypothesis& hyp, const FusionWeights& w) {
  check(w.alpha >= 0.0 && w.alpha <= 1.0 && w.beta >= 0.0 && w.beta <= 1.0,
        "fuse: weights must lie in [0, 1]");
  const double second =
      hyp.phoneme_scorable
          ? w.beta * hyp.lm_score + (1.0 - w.beta) * hyp.phoneme_ctc_score
          : hyp.lm_score;
  return w.alpha * hyp.las_score + (1.0 - w.alpha) * second;
}

void rerank(std::vector<Hypothesis>& nbest, const FusionWeights& w) {
  std::stable_sort(nbest.begin(), nbest.end(),
                   [&w](const Hypothesis& a, const Hypothesis& b) {
                     return fuse(a, w) > fuse(b, w);
                   });
}

double fusion_corpus_wer(const std::vector<ValidationUtt>& validation,
                         const FusionWeights& w) {
  check(!validation.empty(), "fusion_corpus_wer: empty validation set");
  std::vector<std::string> hyps, refs;
  for (const auto& utt : validation) {
    check(!utt.nbest.empty(), "fusion_corpus_wer: utterance without n-best");
    std::size_t best = 0;
    double best_score = fuse(utt.nbest[0], w);
    for (std::size_t i = 1; i < utt.nbest.size(); ++i) {
      const double s = fuse(utt.nbest[i], w);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    hyps.push_back(utt.nbest[best].text);
    refs.push_back(utt.ref_text);
  }
  return eval::corpus_wer(hyps, refs);
}

std::vector<double> fusion_grid(double grid_step) {
  check(grid_step > 0.0 && grid_step <= 1.0, "fusion_grid: grid_step ",
        grid_step, " outside (0, 1]");
  std::vector<double> grid;
  for (int i = 0; i * grid_step <= 1.0 + 1e-9; ++i)
    grid.push_back(std::min(1.0, i * grid_step));
  return grid;
}

FusionWeights grid_search_fusion(const std::vector<ValidationUtt>& validation,
                                 double grid_step) {
  const std::vector<double> grid = fusion_grid(grid_step);
  FusionWeights best;
  double best_wer = std::numeric_limits<double>::infinity();
  // Ascending scan with <= acceptance: ties settle on the largest alpha,
  // then the largest beta.
  for (double alpha : grid) {
    for (double beta : grid) {
      const FusionWeights w{alpha, beta};
      const double wer = fusion_corpus_wer(validation, w);
      if (wer <= best_wer) {
        best_wer = wer;
        best = w;
      }
    }
  }
  return best;
}

}  // namespace lasr::decode
