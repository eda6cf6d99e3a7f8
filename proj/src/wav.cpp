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

#include "lasr/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "lasr/error.hpp"
#include "lasr/io.hpp"

namespace lasr::frontend {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

WavData read_wav(const std::string& path) {
  const std::string bytes = util::read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  check(bytes.size() >= 44 && std::memcmp(p, "RIFF", 4) == 0 &&
            std::memcmp(p + 8, "WAVE", 4) == 0,
        "read_wav: ", path, " is not a RIFF/WAVE file");

  WavData out;
  int bits = 0;
  int channels = 0;
  std::size_t pos = 12;
  bool have_fmt = false;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = le32(p + pos + 4);
    const bool is_fmt = std::memcmp(p + pos, "fmt ", 4) == 0;
    const bool is_data = std::memcmp(p + pos, "data", 4) == 0;
    const std::size_t body = pos + 8;
    if (is_fmt) {
      check(body + 16 <= bytes.size(), "read_wav: truncated fmt chunk in ",
            path);
      const int format = le16(p + body);
      channels = le16(p + body + 2);
      out.sample_rate_hz = static_cast<int>(le32(p + body + 4));
      bits = le16(p + body + 14);
      check(format == 1, "read_wav: ", path, " uses format tag ", format,
            ", only PCM (1) is supported");
      have_fmt = true;
    } else if (is_data) {
      check(have_fmt, "read_wav: data chunk before fmt chunk in ", path);
      check(channels == 1, "read_wav: ", path, " has ", channels,
            " channels, only mono is supported");
      check(bits == 16, "read_wav: ", path, " has ", bits,
            " bits per sample, only 16 is supported");
      const std::size_t n = std::min<std::size_t>(chunk_size,
                                                  bytes.size() - body) /
                            2;
      out.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int16_t>(le16(p + body + 2 * i));
        out.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return out;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  fail("read_wav: ", path, " has no data chunk");
}

void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate_hz) {
  check(sample_rate_hz > 0, "write_wav: bad sample rate ", sample_rate_hz);
  util::atomic_write(path, [&](std::ostream& os) {
    const std::uint32_t data_bytes =
        static_cast<std::uint32_t>(samples.size() * 2);
    auto u32 = [&os](std::uint32_t v) { util::write_u32(os, v); };
    auto u16 = [&os](std::uint16_t v) {
      os.write(reinterpret_cast<const char*>(&v), 2);
    };
    os.write("RIFF", 4);
    u32(36 + data_bytes);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    u32(16);
    u16(1);  // PCM
    u16(1);  // mono
    u32(static_cast<std::uint32_t>(sample_rate_hz));
    u32(static_cast<std::uint32_t>(sample_rate_hz * 2));
    u16(2);
    u16(16);
    os.write("data", 4);
    u32(data_bytes);
    for (double s : samples) {
      const double clipped = std::clamp(s, -1.0, 1.0);
      const auto v = static_cast<std::int16_t>(
          std::lround(clipped * 32767.0));
      u16(static_cast<std::uint16_t>(v));
    }
  });
}

}  // namespace lasr::frontend
