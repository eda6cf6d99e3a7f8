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

// Drives the installed binaries end to end: synthesize, featurize, train the
// tokenizer / language model / recognizer / phoneme scorer, decode, rescore
// and evaluate, checking exit codes and artifact determinism along the way.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "lasr/error.hpp"
#include "lasr/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary(const char* env_name) {
  const char* path = std::getenv(env_name);
  REQUIRE_MESSAGE(path != nullptr, env_name, " must point at the binary");
  return path;
}

int run(const std::string& command) {
  const int status = std::system((command + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string capture(const std::string& command) {
  const std::string tmp =
      (fs::temp_directory_path() / "lasr_cli_capture.txt").string();
  std::system((command + " > " + tmp + " 2>&1").c_str());
  return lasr::util::read_file(tmp);
}

struct Workspace {
  fs::path root;
  explicit Workspace(const char* name) {
    root = fs::temp_directory_path() / name;
    fs::remove_all(root);
    fs::create_directories(root);
  }
  std::string operator/(const std::string& leaf) const {
    return (root / leaf).string();
  }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("the full pipeline runs end to end deterministically") {
  const std::string lasr = binary("LASR_BIN");
  const std::string synth = binary("LASR_SYNTH_BIN");
  const Workspace ws("lasr_cli_pipeline");

  // Corpora.
  CHECK(run(synth + " --out " + (ws / "train") + " --count 8 --seed 5") == 0);
  CHECK(run(synth + " --out " + (ws / "test") +
            " --count 4 --seed 6 --tag clean --prefix test") == 0);

  // Features (cached container files).
  CHECK(run(lasr + " featurize --manifest " + (ws / "train") +
            "/manifest.jsonl --out " + (ws / "feats") + " --mels 10") == 0);
  CHECK(fs::exists(ws / "feats"));

  // Featurize twice with the same seed: byte-identical artifacts.
  CHECK(run(lasr + " featurize --manifest " + (ws / "train") +
            "/manifest.jsonl --out " + (ws / "feats2") + " --mels 10") == 0);
  bool any = false;
  for (const auto& entry : fs::directory_iterator(ws / "feats")) {
    const auto twin = fs::path(ws / "feats2") / entry.path().filename();
    CHECK(lasr::util::read_file(entry.path().string()) ==
          lasr::util::read_file(twin.string()));
    any = true;
  }
  CHECK(any);

  // Subword inventory and language model.
  CHECK(run(lasr + " tokenizer-train --manifest " + (ws / "train") +
            "/manifest.jsonl --vocab-size 40 --out " + (ws / "tok.tsv")) ==
        0);
  CHECK(run(lasr + " lm-train --text " + (ws / "train") +
            "/corpus.txt --order 3 --out " + (ws / "lm.arpa")) == 0);

  // Recognizer training config.
  {
    std::ofstream ini(ws / "train.ini");
    ini << "[model]\nkind = las\nenc_layers = 2\ncompress_after = 1,2\n"
           "enc_hidden = 12\ndec_layers = 1\ndec_hidden = 12\n"
           "attn_kind = content\nattn_heads = 1\nhead_size = 12\n"
           "dropout = 0.1\nss_start_epoch = 20\nbeam = 3\n\n"
           "[data]\nn_mels = 10\nstack = 3\naugment = true\n"
           "freq_mask = 2\ntime_mask = 6\n\n"
           "[train]\nseed = 42\nlr = 2e-3\nbatch_size = 4\n"
        << "tokenizer = " << (ws / "tok.tsv") << "\n\n"
        << "[pass.1]\nmanifest = " << (ws / "train")
        << "/manifest.jsonl\nepochs = 8\nobjective = ce\n";
  }
  CHECK(run(lasr + " train --config " + (ws / "train.ini") + " --out " +
            (ws / "run")) == 0);
  CHECK(fs::exists(ws / "run/model.ckpt"));
  CHECK(fs::exists(ws / "run/train_state.ckpt"));
  CHECK(fs::exists(ws / "run/train_log.jsonl"));

  // Config overrides steer the plan (zero epochs leave the init untouched).
  CHECK(run(lasr + " train --config " + (ws / "train.ini") + " --out " +
            (ws / "run0") + " --set pass.1.epochs=0") == 0);

  // Phoneme scorer training config.
  {
    std::ofstream ini(ws / "scorer.ini");
    ini << "[model]\nkind = phoneme-ctc\nlayers = 1\nhidden = 16\n\n"
           "[data]\nn_mels = 10\nstack = 3\naugment = false\n"
        << "lexicon = " << (ws / "train") << "/lexicon.tsv\n\n"
        << "[train]\nseed = 7\nlr = 2e-3\n\n"
        << "[pass.1]\nmanifest = " << (ws / "train")
        << "/manifest.jsonl\nepochs = 3\n";
  }
  CHECK(run(lasr + " train --config " + (ws / "scorer.ini") + " --out " +
            (ws / "scorer_run")) == 0);
  CHECK(fs::exists(ws / "scorer_run/scorer.ckpt"));

  // Decode, twice, with workers: identical bytes (idempotent under the seed).
  const std::string decode_cmd =
      lasr + " decode --model " + (ws / "run/model.ckpt") + " --tokenizer " +
      (ws / "tok.tsv") + " --manifest " + (ws / "test") +
      "/manifest.jsonl --beam 3 --max-len 20 --workers 2 --hyp " +
      (ws / "hyp.jsonl") + " --out ";
  CHECK(run(decode_cmd + (ws / "nbest.jsonl")) == 0);
  CHECK(run(decode_cmd + (ws / "nbest2.jsonl")) == 0);
  CHECK(lasr::util::read_file(ws / "nbest.jsonl") ==
        lasr::util::read_file(ws / "nbest2.jsonl"));

  // Rescore with the language model, scorer and a grid search.
  CHECK(run(lasr + " rescore --nbest " + (ws / "nbest.jsonl") + " --lm " +
            (ws / "lm.arpa") + " --model " + (ws / "scorer_run/scorer.ckpt") +
            " --lexicon " + (ws / "train") + "/lexicon.tsv --manifest " +
            (ws / "test") + "/manifest.jsonl --grid --grid-step 0.5 --ref " +
            (ws / "test") + "/manifest.jsonl --out " +
            (ws / "rescored.jsonl") + " --hyp " + (ws / "rehyp.jsonl")) == 0);

  // Evaluate: a WER table on stdout plus a JSON report.
  const std::string report =
      capture(lasr + " evaluate --hyp " + (ws / "rehyp.jsonl") + " --ref " +
              (ws / "test") + "/manifest.jsonl --json " + (ws / "wer.json"));
  CHECK(report.find("WER%") != std::string::npos);
  CHECK(report.find("clean") != std::string::npos);
  CHECK(fs::exists(ws / "wer.json"));
}

TEST_CASE("bad invocations exit with the usage code") {
  const std::string lasr = binary("LASR_BIN");
  CHECK(run(lasr + " decode") == 2);                 // missing required flags
  CHECK(run(lasr + " no-such-subcommand") == 2);
  CHECK(run(lasr) == 2);                             // a subcommand is required
  CHECK(run(lasr + " --help") == 0);
}

TEST_CASE("runtime failures exit with code one and a message") {
  const std::string lasr = binary("LASR_BIN");
  const Workspace ws("lasr_cli_errors");
  CHECK(run(lasr + " evaluate --hyp /nonexistent.jsonl --ref /nonexistent.jsonl") == 1);
  const std::string msg = capture(
      lasr + " evaluate --hyp /nonexistent.jsonl --ref /nonexistent.jsonl");
  CHECK(msg.find("error:") != std::string::npos);
}

TEST_CASE("gradcheck reports every component") {
  const std::string lasr = binary("LASR_BIN");
  const std::string out = capture(lasr + " gradcheck");
  CHECK(out.find("[PASS]") != std::string::npos);
  CHECK(out.find("ctc_loss") != std::string::npos);
  CHECK(out.find("mwer_loss") != std::string::npos);
  CHECK(run(lasr + " gradcheck") == 0);
}

TEST_SUITE_END();
