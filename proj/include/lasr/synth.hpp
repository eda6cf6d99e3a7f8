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

#include <string>
#include <vector>

#include "lasr/frontend.hpp"
#include "lasr/rng.hpp"
#include "lasr/tokenizer.hpp"

namespace lasr::synth {

// Deterministic stand-in for real speech: each letter maps to a fixed tone,
// words are letter-tone sequences, utterances come from a small template
// grammar. Lets the whole pipeline train and decode without any external
// data.
struct SynthOptions {
  int sample_rate_hz = 8000;
  double letter_dur_s = 0.09;
  double gap_dur_s = 0.06;
  double noise_level = 0.0;        // additive white noise amplitude
  bool secondary_speaker = false;  // quiet overlapping word in the background
  int min_words = 2;
  int max_words = 3;
  int num_utterances = 20;
  std::uint64_t seed = 42;
  std::string tag;  // optional manifest tag (clean|noisy)
};

const std::vector<std::string>& word_list();

std::vector<double> word_waveform(const std::string& word, int sample_rate_hz,
                                  double letter_dur_s);

struct SynthUtterance {
  std::string text;
  std::vector<double> samples;
};

SynthUtterance make_utterance(const SynthOptions& opts, util::Rng& rng);

// Writes <dir>/wav/*.wav, <dir>/manifest.jsonl, <dir>/corpus.txt and
// <dir>/lexicon.tsv (letters as phonemes); returns the manifest entries.
std::vector<frontend::ManifestEntry> write_corpus(const std::string& dir,
                                                  const SynthOptions& opts,
                                                  const std::string& prefix);

// Letter-per-phoneme lexicon over the built-in word list.
tokenizer::Lexicon letter_lexicon();

}  // namespace lasr::synth
