// sbcm/wav.cc

// Copyright 2026  The sbcm Authors

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

#include "sbcm/wav.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sbcm/common.h"

namespace sbcm {

namespace {

void PutU32(std::vector<char> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::vector<char> *out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

uint32_t GetU32(const std::vector<char> &b, size_t pos) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + i]);
  return v;
}

uint16_t GetU16(const std::vector<char> &b, size_t pos) {
  return static_cast<uint16_t>(static_cast<unsigned char>(b[pos]) |
                               (static_cast<unsigned char>(b[pos + 1]) << 8));
}

}  // namespace

void Waveform::Validate() const {
  if (sample_rate <= 0) throw ConfigError("waveform: sample rate must be positive");
  if (samples.empty()) throw ConfigError("waveform: no samples");
  for (double s : samples)
    if (!(s >= -1.0 && s <= 1.0))
      throw ConfigError("waveform: sample outside [-1, 1]");
}

std::vector<char> EncodeWav(const Waveform &wave) {
  wave.Validate();
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  std::vector<char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_bytes);
  for (double s : wave.samples) {
    double q = std::nearbyint(s * 32768.0);
    if (q > 32767.0) q = 32767.0;
    if (q < -32768.0) q = -32768.0;
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  return out;
}

Waveform DecodeWav(const std::vector<char> &b, const std::string &what) {
  auto fail = [&](const std::string &msg) { return IoError(what + ": " + msg); };
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 ||
      std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw fail("not a RIFF/WAVE file");
  size_t pos = 12;
  bool have_fmt = false;
  Waveform wave;
  while (pos + 8 <= b.size()) {
    const std::string id(b.data() + pos, 4);
    const uint32_t size = GetU32(b, pos + 4);
    const size_t body = pos + 8;
    if (body + size > b.size()) throw fail("truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) throw fail("short fmt chunk");
      if (GetU16(b, body) != 1) throw fail("only PCM is supported");
      if (GetU16(b, body + 2) != 1) throw fail("only mono is supported");
      wave.sample_rate = static_cast<int>(GetU32(b, body + 4));
      if (GetU16(b, body + 14) != 16) throw fail("only 16-bit samples are supported");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      wave.samples.resize(size / 2);
      for (size_t i = 0; i < wave.samples.size(); ++i)
        wave.samples[i] = static_cast<int16_t>(GetU16(b, body + 2 * i)) / 32768.0;
      if (wave.samples.empty()) throw fail("empty data chunk");
      return wave;
    }
    pos = body + size + (size & 1);
  }
  throw fail("no data chunk");
}

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeWav(bytes, path);
}

void WriteWav(const std::string &path, const Waveform &wave) {
  const auto bytes = EncodeWav(wave);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace sbcm
