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

#include <complex>
#include <vector>

#include "ksr/audio.hpp"
#include "ksr/common.hpp"

namespace ksr {

struct FrameConfig {
  double frame_len_ms = 20.0;
  double hop_ms = 10.0;
  // When set, frames are zero-filled to the next power of two before the
  // transform; otherwise the transform length is the frame length itself.
  bool pad_to_pow2 = true;

  int frame_len_samples(int sample_rate) const;
  int hop_samples(int sample_rate) const;
};

enum class WindowKind { hamming_paper, hamming_standard, rectangular };

// w(n) = 0.54 - a*cos(2*pi*n/(N-1)). The hamming_paper variant uses a = 0.45,
// hamming_standard the conventional a = 0.46.
struct WindowSpec {
  WindowKind kind = WindowKind::hamming_paper;
  double a = 0.45;

  static WindowSpec hamming_paper() { return {WindowKind::hamming_paper, 0.45}; }
  static WindowSpec hamming_standard() { return {WindowKind::hamming_standard, 0.46}; }
  static WindowSpec rectangular() { return {WindowKind::rectangular, 0.0}; }
};

// Non-redundant half of a real transform: bins 0..n_fft/2.
struct ComplexSpectrum {
  std::vector<std::complex<double>> bins;
  int n_fft = 0;
};

bool is_power_of_two(int n);
int next_power_of_two(int n);

// Splits the signal into frames of frame_len_samples starting every
// hop_samples. The incomplete tail is dropped, so the frame count is
// floor((L - N)/hop) + 1.
std::vector<std::vector<double>> frame_signal(const AudioBuffer& buf,
                                              const FrameConfig& cfg);

std::vector<double> make_window(const WindowSpec& spec, int n);

// Returns the frame unchanged if its length is a power of two, otherwise
// appends zeros up to the next power of two.
std::vector<double> zero_pad_pow2(std::vector<double> frame);

// Radix-2 transform of a real frame; requires n_fft to be a power of two and
// at least the frame length. Returns bins k = 0..n_fft/2.
ComplexSpectrum fft_real(const std::vector<double>& frame, int n_fft);

// Direct-evaluation transform for arbitrary n_fft (used when the frame
// length is not padded to a power of two).
ComplexSpectrum dft_real(const std::vector<double>& frame, int n_fft);

// frame -> window -> zero fill -> transform, per frame. n_fft_override picks
// the transform length explicitly; 0 derives it from cfg.pad_to_pow2.
std::vector<ComplexSpectrum> stft(const AudioBuffer& buf, const FrameConfig& cfg,
                                  const WindowSpec& win, int n_fft_override = 0);

}  // namespace ksr
