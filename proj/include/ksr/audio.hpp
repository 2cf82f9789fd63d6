// Copyright (c) 2026 ksr authors. All Rights Reserved.
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

#include <string>
#include <utility>
#include <vector>

#include "ksr/common.hpp"

namespace ksr {

// Mono signal with samples normalized to [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

enum class AudioFormat { wav_pcm16, raw_pcm16 };

struct TrimReport {
  long long leading_samples_removed = 0;
  long long trailing_samples_removed = 0;
  double threshold_db = 0.0;
  // Every analysis window fell below the threshold; the returned buffer is
  // empty. Reported as a status, not an error.
  bool all_silent = false;
};

// Reads mono 16-bit PCM audio. For raw_pcm16 the rate hint is mandatory;
// for wav_pcm16 the header must declare mono 16-bit PCM (format code 1).
// Samples are the 16-bit integers divided by 32768.0.
AudioBuffer load_audio(const std::string& path, AudioFormat format,
                       int sample_rate_hint = 0);

// Writes a canonical RIFF/WAVE mono 16-bit PCM file. Samples are quantized
// with round-to-nearest and clamped to the int16 range.
void save_wav(const std::string& path, const AudioBuffer& buf);

// Removes maximal leading and trailing runs of analysis windows whose RMS is
// more than threshold_db below the loudest window's RMS. The signal is split
// into consecutive non-overlapping windows of window_ms; interior windows are
// never removed, so the result is a contiguous sub-span of the input.
std::pair<AudioBuffer, TrimReport> trim_silence(const AudioBuffer& buf,
                                                double threshold_db = 30.0,
                                                double window_ms = 20.0);

}  // namespace ksr
