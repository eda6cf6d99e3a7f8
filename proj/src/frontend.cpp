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

#include "lasr/frontend.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "lasr/error.hpp"
#include "lasr/io.hpp"
#include "lasr/rng.hpp"

namespace lasr::frontend {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT over interleaved complex data.
void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const int n = static_cast<int>(re.size());
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / len;
    const double wr = std::cos(ang);
    const double wi = std::sin(ang);
    for (int i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (int k = 0; k < len / 2; ++k) {
        const int a = i + k;
        const int b = i + k + len / 2;
        const double tr = re[b] * cr - im[b] * ci;
        const double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

// Triangular mel filterbank as a (n_mels x n_bins) weight matrix.
std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_fft,
                                                int sample_rate_hz) {
  const int n_bins = n_fft / 2 + 1;
  const double nyquist = sample_rate_hz / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (int m = 0; m < n_mels + 2; ++m)
    edges[m] = mel_to_hz(mel_max * m / (n_mels + 1));

  std::vector<std::vector<double>> bank(
      n_mels, std::vector<double>(static_cast<std::size_t>(n_bins), 0.0));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * sample_rate_hz / n_fft;
      if (hz <= lo || hz >= hi) continue;
      bank[m][k] = hz <= mid ? (hz - lo) / (mid - lo) : (hi - hz) / (hi - mid);
    }
  }
  return bank;
}

}  // namespace

std::vector<double> mel_filter_centers_hz(int n_mels, int sample_rate_hz) {
  const double mel_max = hz_to_mel(sample_rate_hz / 2.0);
  std::vector<double> centers(static_cast<std::size_t>(n_mels));
  for (int m = 0; m < n_mels; ++m)
    centers[m] = mel_to_hz(mel_max * (m + 1) / (n_mels + 1));
  return centers;
}

FeatureSequence compute_log_mel(const AudioUtterance& utt, int n_mels,
                                double window_ms, double hop_ms) {
  check(utt.sample_rate_hz > 0, "compute_log_mel: sample rate ",
        utt.sample_rate_hz, " must be positive");
  check(n_mels >= 1, "compute_log_mel: n_mels ", n_mels, " must be >= 1");
  const int window = static_cast<int>(
      std::lround(utt.sample_rate_hz * window_ms / 1000.0));
  const int hop =
      static_cast<int>(std::lround(utt.sample_rate_hz * hop_ms / 1000.0));
  check(window > 0 && hop > 0, "compute_log_mel: degenerate window/hop (",
        window, ", ", hop, ") samples");
  const auto n = static_cast<std::int64_t>(utt.samples.size());
  check(n >= window, "compute_log_mel: utterance ", utt.id, " has ", n,
        " samples, shorter than one ", window, "-sample window");

  const int num_frames = 1 + static_cast<int>((n - window) / hop);
  const int n_fft = next_pow2(window);
  const auto bank = mel_filterbank(n_mels, n_fft, utt.sample_rate_hz);

  std::vector<double> hann(static_cast<std::size_t>(window));
  for (int i = 0; i < window; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (window - 1));

  FeatureSequence out;
  out.frames = ad::Array::zeros(num_frames, n_mels);
  out.frame_shift_ms = hop_ms;

  std::vector<double> re(static_cast<std::size_t>(n_fft));
  std::vector<double> im(static_cast<std::size_t>(n_fft));
  for (int t = 0; t < num_frames; ++t) {
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    const std::int64_t start = static_cast<std::int64_t>(t) * hop;
    for (int i = 0; i < window; ++i)
      re[i] = utt.samples[static_cast<std::size_t>(start + i)] * hann[i];
    fft_radix2(re, im);
    for (int m = 0; m < n_mels; ++m) {
      double energy = 0.0;
      const auto& filt = bank[m];
      for (int k = 0; k <= n_fft / 2; ++k) {
        if (filt[k] == 0.0) continue;
        energy += filt[k] * (re[k] * re[k] + im[k] * im[k]);
      }
      out.frames.at(t, m) = std::log(energy + kLogFloor);
    }
  }
  return out;
}

FeatureSequence spec_augment(const FeatureSequence& feat,
                             const AugmentPolicy& policy,
                             std::vector<MaskRect>* applied) {
  check(policy.freq_mask_param >= 0 && policy.time_mask_param >= 0,
        "spec_augment: mask parameters must be non-negative");
  FeatureSequence out = feat;
  util::Rng rng(policy.seed);
  const int t_len = feat.num_frames();
  const int d_len = feat.dim();

  auto draw_mask = [&rng](int param, int axis_len) -> std::pair<int, int> {
    if (param <= 0 || axis_len <= 0) return {0, 0};
    int width = rng.uniform_int(param);  // uniform over [0, param)
    width = std::min(width, axis_len);   // clipped at the edge
    if (width == 0) return {0, 0};
    const int start = rng.uniform_int(axis_len - width + 1);
    return {start, start + width};
  };

  for (int m = 0; m < policy.masks_per_axis; ++m) {
    const auto [f0, f1] = draw_mask(policy.freq_mask_param, d_len);
    if (applied && f1 > f0) applied->push_back({false, f0, f1});
    for (int t = 0; t < t_len; ++t)
      for (int d = f0; d < f1; ++d) out.frames.at(t, d) = 0.0;

    const auto [t0, t1] = draw_mask(policy.time_mask_param, t_len);
    if (applied && t1 > t0) applied->push_back({true, t0, t1});
    for (int t = t0; t < t1; ++t)
      for (int d = 0; d < d_len; ++d) out.frames.at(t, d) = 0.0;
  }
  return out;
}

FeatureSequence stack_frames(const FeatureSequence& feat, int k) {
  check(k >= 1, "stack_frames: k must be >= 1, got ", k);
  const int t_in = feat.num_frames();
  const int d_in = feat.dim();
  const int t_out = (t_in + k - 1) / k;
  FeatureSequence out;
  out.frames = ad::Array::zeros(t_out, k * d_in);
  out.frame_shift_ms = feat.frame_shift_ms * k;
  for (int t = 0; t < t_out; ++t) {
    for (int j = 0; j < k; ++j) {
      const int src = t * k + j;
      if (src >= t_in) break;  // trailing group stays zero padded
      for (int d = 0; d < d_in; ++d)
        out.frames.at(t, j * d_in + d) = feat.frames.at(src, d);
    }
  }
  return out;
}

void save_features(const std::string& path, const std::string& utt_id,
                   const FeatureSequence& feat) {
  util::atomic_write(path, [&](std::ostream& os) {
    os.write("LASRFEA1", 8);
    util::write_string(os, utt_id);
    util::write_u32(os, static_cast<std::uint32_t>(feat.frames.rows));
    util::write_u32(os, static_cast<std::uint32_t>(feat.frames.cols));
    util::write_f64(os, feat.frame_shift_ms);
    util::write_f64_vec(os, feat.frames.data);
  });
}

FeatureSequence load_features(const std::string& path, std::string* utt_id) {
  std::ifstream is(path, std::ios::binary);
  check(is.good(), "load_features: cannot open ", path);
  char magic[8];
  is.read(magic, 8);
  check(is.good() && std::string(magic, 8) == "LASRFEA1",
        "load_features: ", path, " is not a feature container");
  const std::string id = util::read_string(is);
  if (utt_id) *utt_id = id;
  const int rows = static_cast<int>(util::read_u32(is));
  const int cols = static_cast<int>(util::read_u32(is));
  FeatureSequence feat;
  feat.frame_shift_ms = util::read_f64(is);
  feat.frames = ad::Array(rows, cols, util::read_f64_vec(is));
  return feat;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::vector<ManifestEntry> entries;
  int line_no = 0;
  for (const std::string& line : util::read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail("read_manifest: ", path, " line ", line_no, ": ", e.what());
    }
    ManifestEntry e;
    check(j.contains("id"), "read_manifest: ", path, " line ", line_no,
          ": missing id");
    e.id = j.at("id").get<std::string>();
    e.audio_path = j.value("audio_path", "");
    e.text = j.value("text", "");
    if (j.contains("tag")) e.tag = j.at("tag").get<std::string>();
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries) {
  util::atomic_write(path, [&](std::ostream& os) {
    for (const auto& e : entries) {
      nlohmann::json j;
      j["id"] = e.id;
      j["audio_path"] = e.audio_path;
      j["text"] = e.text;
      if (e.tag) j["tag"] = *e.tag;
      os << j.dump() << "\n";
    }
  });
}

}  // namespace lasr::frontend
