// spectral/wav-io.cc

// Copyright 2026  The avfront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "avfront/spectral.h"

namespace avfront {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadU16(const unsigned char *p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

void PutU32(std::string *s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16(std::string *s, uint16_t v) {
  s->push_back(static_cast<char>(v & 0xff));
  s->push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  Require(is.good(), ErrorCode::kIoError, "cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  Require(buf.size() >= 12 && std::memcmp(buf.data(), "RIFF", 4) == 0 &&
              std::memcmp(buf.data() + 8, "WAVE", 4) == 0,
          ErrorCode::kBadFile, path + ": not a RIFF/WAVE file");

  size_t pos = 12;
  bool have_fmt = false;
  int sample_rate = 0;
  while (pos + 8 <= buf.size()) {
    const uint32_t size = ReadU32(&buf[pos + 4]);
    const size_t body = pos + 8;
    Require(body + size <= buf.size(), ErrorCode::kBadFile, path + ": truncated chunk");
    if (std::memcmp(&buf[pos], "fmt ", 4) == 0) {
      Require(size >= 16, ErrorCode::kBadFile, path + ": short fmt chunk");
      const uint16_t format = ReadU16(&buf[body]);
      const uint16_t channels = ReadU16(&buf[body + 2]);
      sample_rate = static_cast<int>(ReadU32(&buf[body + 4]));
      const uint16_t bits = ReadU16(&buf[body + 14]);
      Require(format == 1 && channels == 1 && bits == 16, ErrorCode::kBadFile,
              path + ": only PCM 16-bit mono WAV is supported (format=" +
                  std::to_string(format) + ", channels=" + std::to_string(channels) +
                  ", bits=" + std::to_string(bits) + ")");
      have_fmt = true;
    } else if (std::memcmp(&buf[pos], "data", 4) == 0) {
      Require(have_fmt, ErrorCode::kBadFile, path + ": data chunk before fmt chunk");
      Waveform w;
      w.sample_rate = sample_rate;
      w.samples.resize(size / 2);
      for (size_t i = 0; i < w.samples.size(); ++i) {
        const int16_t v = static_cast<int16_t>(ReadU16(&buf[body + 2 * i]));
        w.samples[i] = v / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  Fail(ErrorCode::kBadFile, path + ": no data chunk");
}

void WriteWav(const std::string &path, const Waveform &w) {
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(&out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, 1);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(w.sample_rate));
  PutU32(&out, static_cast<uint32_t>(w.sample_rate * 2));
  PutU16(&out, 2);
  PutU16(&out, 16);
  out += "data";
  PutU32(&out, data_bytes);
  for (double x : w.samples) {
    const long v = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  std::ofstream os(path, std::ios::binary);
  Require(os.good(), ErrorCode::kIoError, "cannot write " + path);
  os.write(out.data(), out.size());
  Require(os.good(), ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace avfront
