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

// Synthetic-corpus generator: tone-coded words from a template grammar, with
// optional noise and a background speaker, as a stand-in for real recordings.

#include <iostream>

#include "CLI11.hpp"
#include "lasr/error.hpp"
#include "lasr/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic voice-query corpus"};
  lasr::synth::SynthOptions opts;
  std::string out, prefix = "utt";
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--count", opts.num_utterances);
  app.add_option("--seed", opts.seed);
  app.add_option("--sample-rate", opts.sample_rate_hz);
  app.add_option("--noise", opts.noise_level);
  app.add_flag("--secondary", opts.secondary_speaker,
               "overlay a quiet competing word");
  app.add_option("--min-words", opts.min_words);
  app.add_option("--max-words", opts.max_words);
  app.add_option("--tag", opts.tag, "manifest tag (clean|noisy)");
  app.add_option("--prefix", prefix, "utterance id prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto entries = lasr::synth::write_corpus(out, opts, prefix);
    std::cout << "wrote " << entries.size() << " utterances under " << out
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
