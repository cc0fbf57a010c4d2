// sbcm/feature_cache.h

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

#ifndef SBCM_FEATURE_CACHE_H_
#define SBCM_FEATURE_CACHE_H_

#include <string>

#include "sbcm/common.h"

namespace sbcm {

// On-disk layout, all integers little-endian:
//   "SBFC"  magic
//   u32     version (1)
//   u32     dims
//   u32     frames
//   char[16] frontend config hash (hex)
//   f32[frames * dims] row-major coefficients
struct CachedFeatures {
  Matrix feats;
  std::string config_hash;
};

void WriteFeatureCache(const std::string &path, const Matrix &feats,
                       const std::string &config_hash);
CachedFeatures ReadFeatureCache(const std::string &path);

}  // namespace sbcm

#endif  // SBCM_FEATURE_CACHE_H_
