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

// Python bindings over the main operations: feature extraction, subword
// tokenization, losses, n-gram scoring, WER accounting and a checkpointed
// recognizer.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lasr/checkpoint.hpp"
#include "lasr/decode.hpp"
#include "lasr/diagnostics.hpp"
#include "lasr/eval.hpp"
#include "lasr/frontend.hpp"
#include "lasr/lm.hpp"
#include "lasr/losses.hpp"
#include "lasr/model.hpp"
#include "lasr/tape.hpp"
#include "lasr/tokenizer.hpp"
#include "lasr/train.hpp"
#include "lasr/wav.hpp"

namespace py = pybind11;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

lasr::ad::Array to_array(const Matrix& m) {
  const auto buf = m.request();
  if (buf.ndim != 2) throw lasr::Error("expected a 2-D array");
  lasr::ad::Array a(static_cast<int>(buf.shape[0]),
                    static_cast<int>(buf.shape[1]));
  const auto* src = static_cast<const double*>(buf.ptr);
  std::copy(src, src + a.size(), a.data.begin());
  return a;
}

py::array_t<double> from_array(const lasr::ad::Array& a) {
  py::array_t<double> out({a.rows, a.cols});
  std::copy(a.data.begin(), a.data.end(), out.mutable_data());
  return out;
}

class Recognizer {
 public:
  Recognizer(const std::string& model_path, const std::string& tokenizer_path)
      : model_(lasr::ckpt::load_las_model(model_path)),
        subwords_(lasr::tokenizer::load_model(tokenizer_path)) {
    const auto container = lasr::ckpt::load(model_path);
    if (!container.meta.contains("data"))
      throw lasr::Error("checkpoint carries no feature settings");
    data_ = lasr::train::data_config_from_json(container.meta.at("data"));
  }

  py::list transcribe(const py::array_t<double>& samples, int sample_rate_hz,
                      int beam, int max_len) const {
    const auto buf = samples.request();
    if (buf.ndim != 1) throw lasr::Error("expected 1-D audio samples");
    lasr::frontend::AudioUtterance utt;
    utt.id = "py";
    utt.sample_rate_hz = sample_rate_hz;
    const auto* src = static_cast<const double*>(buf.ptr);
    utt.samples.assign(src, src + buf.shape[0]);
    const auto feat = lasr::frontend::compute_log_mel(
        utt, data_.n_mels, data_.window_ms, data_.hop_ms);
    const auto stacked = lasr::frontend::stack_frames(feat, data_.stack);

    lasr::decode::BeamSearchOptions opts;
    opts.beam = beam > 0 ? beam : model_.config().beam;
    opts.max_len = max_len;
    py::list out;
    for (const auto& hyp :
         lasr::decode::beam_search(model_, stacked.frames, opts)) {
      out.append(py::make_tuple(
          lasr::tokenizer::decode(subwords_, hyp.tokens), hyp.las_score));
    }
    return out;
  }

 private:
  lasr::model::LasModel model_;
  lasr::tokenizer::SubwordModel subwords_;
  lasr::train::DataConfig data_;
};

}  // namespace

PYBIND11_MODULE(_lasr, m) {
  m.doc() = "attention encoder-decoder speech recognition core";

  py::register_exception<lasr::Error>(m, "LasrError");

  // ---- frontend -----------------------------------------------------------
  m.def(
      "log_mel",
      [](const py::array_t<double>& samples, int sample_rate_hz, int n_mels,
         double window_ms, double hop_ms) {
        const auto buf = samples.request();
        if (buf.ndim != 1) throw lasr::Error("expected 1-D audio samples");
        lasr::frontend::AudioUtterance utt;
        utt.id = "py";
        utt.sample_rate_hz = sample_rate_hz;
        const auto* src = static_cast<const double*>(buf.ptr);
        utt.samples.assign(src, src + buf.shape[0]);
        return from_array(
            lasr::frontend::compute_log_mel(utt, n_mels, window_ms, hop_ms)
                .frames);
      },
      py::arg("samples"), py::arg("sample_rate_hz"), py::arg("n_mels") = 80,
      py::arg("window_ms") = 20.0, py::arg("hop_ms") = 10.0,
      "Log mel-filterbank features over moving overlapping windows.");

  m.def(
      "spec_augment",
      [](const Matrix& feats, int freq_mask, int time_mask, int masks_per_axis,
         std::uint64_t seed) {
        lasr::frontend::FeatureSequence f;
        f.frames = to_array(feats);
        lasr::frontend::AugmentPolicy policy;
        policy.freq_mask_param = freq_mask;
        policy.time_mask_param = time_mask;
        policy.masks_per_axis = masks_per_axis;
        policy.seed = seed;
        return from_array(lasr::frontend::spec_augment(f, policy).frames);
      },
      py::arg("features"), py::arg("freq_mask") = 27,
      py::arg("time_mask") = 100, py::arg("masks_per_axis") = 1,
      py::arg("seed") = 0, "Random time and mel-frequency range masking.");

  m.def(
      "stack_frames",
      [](const Matrix& feats, int k) {
        lasr::frontend::FeatureSequence f;
        f.frames = to_array(feats);
        return from_array(lasr::frontend::stack_frames(f, k).frames);
      },
      py::arg("features"), py::arg("k") = 3,
      "Concatenate k consecutive frames, zero padding the last group.");

  m.def("read_wav", [](const std::string& path) {
    const auto wav = lasr::frontend::read_wav(path);
    py::array_t<double> samples(
        static_cast<py::ssize_t>(wav.samples.size()));
    std::copy(wav.samples.begin(), wav.samples.end(),
              samples.mutable_data());
    return py::make_tuple(samples, wav.sample_rate_hz);
  });

  // ---- tokenizer ----------------------------------------------------------
  py::class_<lasr::tokenizer::SubwordModel>(m, "SubwordModel")
      .def_static(
          "train",
          [](const std::vector<std::string>& corpus, int vocab_size) {
            lasr::tokenizer::UnigramTrainOptions opts;
            opts.vocab_size = vocab_size;
            return lasr::tokenizer::train_unigram(corpus, opts);
          },
          py::arg("corpus"), py::arg("vocab_size") = 200)
      .def_static("load", &lasr::tokenizer::load_model)
      .def("save",
           [](const lasr::tokenizer::SubwordModel& model,
              const std::string& path) {
             lasr::tokenizer::save_model(model, path);
           })
      .def("encode",
           [](const lasr::tokenizer::SubwordModel& model,
              const std::string& text) {
             return lasr::tokenizer::encode(model, text);
           })
      .def("decode",
           [](const lasr::tokenizer::SubwordModel& model,
              const std::vector<int>& ids) {
             return lasr::tokenizer::decode(model, ids);
           })
      .def_property_readonly("vocab_size",
                             &lasr::tokenizer::SubwordModel::vocab_size)
      .def_property_readonly(
          "pieces",
          [](const lasr::tokenizer::SubwordModel& model) {
            return model.pieces;
          });

  // ---- losses -------------------------------------------------------------
  m.def(
      "ctc_loss",
      [](const Matrix& frame_logits, const std::vector<int>& target,
         int blank) {
        lasr::ad::Array grad;
        const double loss = lasr::losses::ctc_loss_value(
            to_array(frame_logits), target, blank, &grad);
        return py::make_tuple(loss, from_array(grad));
      },
      py::arg("frame_logits"), py::arg("target"), py::arg("blank"),
      "Negative log marginal probability over all alignments, plus the "
      "gradient with respect to the per-frame log-probabilities.");

  m.def(
      "ce_smoothed",
      [](const Matrix& logits, const std::vector<int>& labels,
         double epsilon) {
        lasr::ad::Tape t;
        const auto id = t.leaf(to_array(logits));
        std::vector<lasr::ad::NodeId> rows;
        for (int r = 0; r < t.value(id).rows; ++r)
          rows.push_back(t.slice_rows(id, r, r + 1));
        return t.value(lasr::losses::ce_smoothed(t, rows, labels, epsilon))
            .item();
      },
      py::arg("logits"), py::arg("labels"), py::arg("epsilon") = 0.1);

  m.def(
      "mwer_loss",
      [](const std::vector<double>& seq_logps,
         const std::vector<double>& word_errors) {
        lasr::ad::Tape t;
        const auto id = t.leaf(lasr::ad::Array::row(seq_logps));
        return t.value(lasr::losses::mwer_loss(t, id, word_errors)).item();
      },
      py::arg("seq_logps"), py::arg("word_errors"));

  m.def("smoothed_targets",
        [](const std::vector<int>& labels, int num_classes, double epsilon) {
          return from_array(
              lasr::losses::smoothed_targets(labels, num_classes, epsilon));
        });

  // ---- language model -----------------------------------------------------
  py::class_<lasr::lm::NGramLM>(m, "NGramLM")
      .def_static(
          "train",
          [](const std::vector<std::string>& sentences, int order,
             double discount) {
            lasr::lm::NGramTrainOptions opts;
            opts.order = order;
            opts.discount = discount;
            return lasr::lm::ngram_train(sentences, opts);
          },
          py::arg("sentences"), py::arg("order") = 4,
          py::arg("discount") = 0.75)
      .def_static("load", &lasr::lm::load_arpa)
      .def("save",
           [](const lasr::lm::NGramLM& lm, const std::string& path) {
             lasr::lm::save_arpa(lm, path);
           })
      .def("score",
           [](const lasr::lm::NGramLM& lm,
              const std::vector<std::string>& words) {
             return lasr::lm::ngram_score(lm, words);
           })
      .def_property_readonly("order",
                             [](const lasr::lm::NGramLM& lm) { return lm.order; });

  // ---- evaluation ---------------------------------------------------------
  m.def(
      "levenshtein_words",
      [](const std::vector<std::string>& hyp,
         const std::vector<std::string>& ref) {
        const auto stats = lasr::eval::levenshtein_words(hyp, ref);
        return py::make_tuple(stats.substitutions, stats.deletions,
                              stats.insertions, stats.ref_words);
      },
      py::arg("hyp"), py::arg("ref"),
      "Returns (substitutions, deletions, insertions, reference_words).");

  m.def("corpus_wer", &lasr::eval::corpus_wer, py::arg("hyps"),
        py::arg("refs"));
  m.def("relative_improvement", &lasr::eval::relative_improvement,
        py::arg("baseline_wer"), py::arg("system_wer"));

  // ---- training helpers ---------------------------------------------------
  m.def(
      "ss_prob",
      [](int epoch, int start_epoch, double rate, double max_prob) {
        lasr::model::ModelConfig cfg;
        cfg.vocab_size = 10;
        cfg.ss_start_epoch = start_epoch;
        cfg.ss_rate = rate;
        cfg.ss_max = max_prob;
        return lasr::train::ss_prob(epoch, cfg);
      },
      py::arg("epoch"), py::arg("start_epoch") = 20, py::arg("rate") = 0.02,
      py::arg("max_prob") = 0.3);

  m.def("gradient_suite", [](double step, double tol) {
    py::list out;
    for (const auto& c : lasr::diag::gradient_suite(step, tol))
      out.append(py::make_tuple(c.name, c.max_rel_err, c.pass));
    return out;
  }, py::arg("step") = 1e-5, py::arg("tol") = 1e-4);

  // ---- recognizer ---------------------------------------------------------
  py::class_<Recognizer>(m, "Recognizer")
      .def(py::init<const std::string&, const std::string&>(),
           py::arg("model_path"), py::arg("tokenizer_path"))
      .def("transcribe", &Recognizer::transcribe, py::arg("samples"),
           py::arg("sample_rate_hz"), py::arg("beam") = 0,
           py::arg("max_len") = 48,
           "Returns (text, log_score) tuples, best first.");
}
