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

#include "lasr/synth.hpp"

#include <cmath>
#include <filesystem>

#include "lasr/error.hpp"
#include "lasr/io.hpp"
#include "lasr/wav.hpp"

namespace lasr::synth {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Template grammar: [action] color object.
const std::vector<std::string> kActions = {"show", "find", "buy"};
const std::vector<std::string> kColors = {"red", "blue", "green", "black",
                                          "pink"};
const std::vector<std::string> kObjects = {"shoe", "watch", "bag", "case",
                                           "lamp", "desk", "fan"};

// Tone frequency for a letter, log-spaced over roughly 300..2400 Hz.
double letter_freq(char letter) {
  const int idx = letter - 'a';
  return 300.0 * std::pow(2.0, 3.0 * idx / 25.0);
}

void append_tone(std::vector<double>* out, double freq, int samples,
                 int sample_rate_hz) {
  const int ramp = std::min(samples / 8, sample_rate_hz / 200);
  for (int i = 0; i < samples; ++i) {
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(kPi * i / ramp);
    if (samples - 1 - i < ramp)
      env = std::min(env, 0.5 - 0.5 * std::cos(kPi * (samples - 1 - i) / ramp));
    const double t = static_cast<double>(i) / sample_rate_hz;
    const double v = 0.45 * std::sin(2.0 * kPi * freq * t) +
                     0.18 * std::sin(2.0 * kPi * 2.0 * freq * t);
    out->push_back(env * v);
  }
}

}  // namespace

const std::vector<std::string>& word_list() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> all;
    all.insert(all.end(), kActions.begin(), kActions.end());
    all.insert(all.end(), kColors.begin(), kColors.end());
    all.insert(all.end(), kObjects.begin(), kObjects.end());
    return all;
  }();
  return words;
}

std::vector<double> word_waveform(const std::string& word, int sample_rate_hz,
                                  double letter_dur_s) {
  std::vector<double> samples;
  const int per_letter =
      static_cast<int>(std::lround(letter_dur_s * sample_rate_hz));
  for (char c : word) {
    check(c >= 'a' && c <= 'z', "word_waveform: word '", word,
          "' has a non a-z letter");
    append_tone(&samples, letter_freq(c), per_letter, sample_rate_hz);
  }
  return samples;
}

SynthUtterance make_utterance(const SynthOptions& opts, util::Rng& rng) {
  check(opts.min_words >= 1 && opts.max_words >= opts.min_words,
        "make_utterance: bad word count range");
  const int n_words =
      opts.min_words + rng.uniform_int(opts.max_words - opts.min_words + 1);
  std::vector<std::string> words;
  if (n_words >= 3)
    words.push_back(kActions[static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(kActions.size())))]);
  words.push_back(kColors[static_cast<std::size_t>(
      rng.uniform_int(static_cast<int>(kColors.size())))]);
  words.push_back(kObjects[static_cast<std::size_t>(
      rng.uniform_int(static_cast<int>(kObjects.size())))]);
  while (static_cast<int>(words.size()) < n_words) {
    words.push_back(kObjects[static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(kObjects.size())))]);
  }

  SynthUtterance utt;
  const int gap =
      static_cast<int>(std::lround(opts.gap_dur_s * opts.sample_rate_hz));
  utt.samples.insert(utt.samples.end(), static_cast<std::size_t>(gap), 0.0);
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (w > 0) {
      utt.text += ' ';
      utt.samples.insert(utt.samples.end(), static_cast<std::size_t>(gap),
                         0.0);
    }
    utt.text += words[w];
    const auto wav =
        word_waveform(words[w], opts.sample_rate_hz, opts.letter_dur_s);
    utt.samples.insert(utt.samples.end(), wav.begin(), wav.end());
  }
  utt.samples.insert(utt.samples.end(), static_cast<std::size_t>(gap), 0.0);

  if (opts.secondary_speaker) {
    // A quiet competing word somewhere in the middle.
    const auto& vocab = word_list();
    const auto wav = word_waveform(
        vocab[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(vocab.size())))],
        opts.sample_rate_hz, opts.letter_dur_s);
    const int max_off =
        std::max(1, static_cast<int>(utt.samples.size()) -
                        static_cast<int>(wav.size()));
    const int off = rng.uniform_int(max_off);
    for (std::size_t i = 0; i < wav.size(); ++i) {
      if (off + i >= utt.samples.size()) break;
      utt.samples[off + i] += 0.22 * wav[i];
    }
  }
  if (opts.noise_level > 0.0) {
    for (auto& s : utt.samples) s += opts.noise_level * rng.gaussian();
  }
  for (auto& s : utt.samples) s = std::clamp(s, -1.0, 1.0);
  return utt;
}

std::vector<frontend::ManifestEntry> write_corpus(const std::string& dir,
                                                  const SynthOptions& opts,
                                                  const std::string& prefix) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "wav");
  util::Rng rng(opts.seed);
  std::vector<frontend::ManifestEntry> entries;
  std::vector<std::string> texts;
  for (int i = 0; i < opts.num_utterances; ++i) {
    const SynthUtterance utt = make_utterance(opts, rng);
    frontend::ManifestEntry e;
    e.id = prefix + "-" + std::to_string(i);
    e.audio_path = (fs::path(dir) / "wav" / (e.id + ".wav")).string();
    e.text = utt.text;
    if (!opts.tag.empty()) e.tag = opts.tag;
    frontend::write_wav(e.audio_path, utt.samples, opts.sample_rate_hz);
    texts.push_back(utt.text);
    entries.push_back(std::move(e));
  }
  frontend::write_manifest((fs::path(dir) / "manifest.jsonl").string(),
                           entries);
  util::atomic_write((fs::path(dir) / "corpus.txt").string(),
                     [&](std::ostream& os) {
                       for (const auto& t : texts) os << t << "\n";
                     });
  tokenizer::save_lexicon(letter_lexicon(),
                          (fs::path(dir) / "lexicon.tsv").string());
  return entries;
}

tokenizer::Lexicon letter_lexicon() {
  std::vector<std::pair<std::string, std::vector<std::string>>> prons;
  for (const auto& word : word_list()) {
    std::vector<std::string> letters;
    for (char c : word) letters.emplace_back(1, c);
    prons.emplace_back(word, letters);
  }
  return tokenizer::make_lexicon(prons);
}

}  // namespace lasr::synth
