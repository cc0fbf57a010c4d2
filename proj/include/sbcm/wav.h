// sbcm/wav.h

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

#ifndef SBCM_WAV_H_
#define SBCM_WAV_H_

#include <string>
#include <vector>

namespace sbcm {

/// Mono waveform with amplitudes in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  /// Throws ConfigError when empty, sample_rate <= 0 or any sample is
  /// outside [-1, 1] (or non-finite).
  void Validate() const;
};

/// Reads a 16-bit PCM mono RIFF/WAVE file. Samples are scaled by 1/32768.
Waveform ReadWav(const std::string &path);

/// Writes 16-bit PCM mono, little-endian. Samples are rounded to the nearest
/// integer after scaling by 32768 and clamped to the int16 range.
void WriteWav(const std::string &path, const Waveform &wave);

/// Byte image of the WAV file WriteWav would produce.
std::vector<char> EncodeWav(const Waveform &wave);
Waveform DecodeWav(const std::vector<char> &bytes, const std::string &what);

}  // namespace sbcm

#endif  // SBCM_WAV_H_
