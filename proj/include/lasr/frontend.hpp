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

#include <optional>
#include <string>
#include <vector>

#include "lasr/array.hpp"

namespace lasr::frontend {

struct AudioUtterance {
  std::string id;
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate_hz = 0;
  std::optional<std::string> transcript;
};

struct FeatureSequence {
  ad::Array frames;  // T x D
  double frame_shift_ms = 0.0;

  int num_frames() const { return frames.rows; }
  int dim() const { return frames.cols; }
};

struct AugmentPolicy {
  int freq_mask_param = 27;
  int time_mask_param = 100;
  int masks_per_axis = 1;
  std::uint64_t seed = 0;
};

// Rectangle actually blanked by spec_augment, [begin, end) on each axis.
struct MaskRect {
  bool time_axis = false;
  int begin = 0;
  int end = 0;
};

inline constexpr double kLogFloor = 1e-10;

// Log mel-filterbank energies over moving overlapping Hann windows.
// T = 1 + floor((N - window) / hop) frames of dimension n_mels.
FeatureSequence compute_log_mel(const AudioUtterance& utt, int n_mels,
                                double window_ms = 20.0, double hop_ms = 10.0);

FeatureSequence spec_augment(const FeatureSequence& feat,
                             const AugmentPolicy& policy,
                             std::vector<MaskRect>* applied = nullptr);

// Concatenates k consecutive frames; T' = ceil(T/k), D' = k*D, the trailing
// partial group is zero padded.
FeatureSequence stack_frames(const FeatureSequence& feat, int k);

// Center frequencies (Hz) of the triangular filters, HTK mel scale over
// [0, sample_rate/2]. Exposed for tests and inspection tools.
std::vector<double> mel_filter_centers_hz(int n_mels, int sample_rate_hz);

// Feature container file, one utterance per file.
void save_features(const std::string& path, const std::string& utt_id,
                   const FeatureSequence& feat);
FeatureSequence load_features(const std::string& path,
                              std::string* utt_id = nullptr);

// Manifest entry: one JSON object per line with fields {id, audio_path, text}
// and an optional test-set tag.
struct ManifestEntry {
  std::string id;
  std::string audio_path;
  std::string text;
  std::optional<std::string> tag;  // "clean" | "noisy"
};

std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries);

}  // namespace lasr::frontend
