// sbcm/feature_cache.cc

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

#include "sbcm/feature_cache.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace sbcm {

namespace {

constexpr uint32_t kVersion = 1;

void PutU32(std::vector<char> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(const char *p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

}  // namespace

void WriteFeatureCache(const std::string &path, const Matrix &feats,
                       const std::string &config_hash) {
  if (config_hash.size() != 16) throw IoError("feature cache: config hash must be 16 hex chars");
  std::vector<char> out;
  out.reserve(32 + feats.size() * 4);
  out.insert(out.end(), {'S', 'B', 'F', 'C'});
  PutU32(&out, kVersion);
  PutU32(&out, static_cast<uint32_t>(feats.cols()));
  PutU32(&out, static_cast<uint32_t>(feats.rows()));
  out.insert(out.end(), config_hash.begin(), config_hash.end());
  for (Eigen::Index t = 0; t < feats.rows(); ++t)
    for (Eigen::Index d = 0; d < feats.cols(); ++d) {
      const float f = static_cast<float>(feats(t, d));
      if (!std::isfinite(f)) throw IoError("feature cache: non-finite coefficient");
      PutU32(&out, std::bit_cast<uint32_t>(f));
    }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("write failed: " + path);
}

CachedFeatures ReadFeatureCache(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::vector<char> b((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (b.size() < 32 || std::memcmp(b.data(), "SBFC", 4) != 0)
    throw IoError(path + ": not a feature cache file");
  if (GetU32(b.data() + 4) != kVersion) throw IoError(path + ": unsupported version");
  const uint32_t dims = GetU32(b.data() + 8);
  const uint32_t frames = GetU32(b.data() + 12);
  if (b.size() != 32 + static_cast<size_t>(dims) * frames * 4)
    throw IoError(path + ": size does not match header");
  CachedFeatures out;
  out.config_hash.assign(b.data() + 16, 16);
  out.feats.resize(frames, dims);
  const char *p = b.data() + 32;
  for (uint32_t t = 0; t < frames; ++t)
    for (uint32_t d = 0; d < dims; ++d, p += 4)
      out.feats(t, d) = std::bit_cast<float>(GetU32(p));
  return out;
}

}  // namespace sbcm
