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
#include <vector>

#include "ksr/dsp.hpp"
#include "ksr/matrix.hpp"

namespace ksr {

enum class FeatureKind {
  spectrogram,
  log_spectrogram,
  mel_spectrogram,
  log_mel_spectrogram,
  fbank,
  mfcc,
};

const char* feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

// Frame-time feature matrix: one row per frame, one column per feature
// dimension, plus the framing metadata needed to interpret it.
struct FeatureMatrix {
  Matrix data;  // frames x feature_dim
  FeatureKind kind = FeatureKind::spectrogram;
  double frame_len_ms = 0.0;
  double hop_ms = 0.0;
  int sample_rate = 0;

  int frames() const { return data.rows(); }
  int dim() const { return data.cols(); }
};

// Triangular mel-spaced band-pass filters sampled at FFT bin centers.
// edge_freqs_hz holds the B+2 band edges; filter i rises from edge i to
// edge i+1 and falls to edge i+2 with peak weight 1.
struct MelFilterbank {
  Matrix weights;  // B x (n_fft/2 + 1)
  std::vector<double> edge_freqs_hz;
  int b_count = 0;
  double f_min_hz = 0.0;
  double f_max_hz = 0.0;
  int n_fft = 0;
  int sample_rate = 0;
};

// m = 2595 * log10(1 + f/700)
double hz_to_mel(double f_hz);
double mel_to_hz(double mel);

FeatureMatrix power_spectrogram(const std::vector<ComplexSpectrum>& spectra,
                                const FrameConfig& cfg, int sample_rate);

// entry' = ln(max(entry, floor_eps)); only power-like kinds accept it.
FeatureMatrix log_compress(const FeatureMatrix& m, double floor_eps = 1e-10);

MelFilterbank build_mel_filterbank(int b_count, int n_fft, int sample_rate,
                                   double f_min_hz, double f_max_hz);

FeatureMatrix fbank_energies(const FeatureMatrix& spec, const MelFilterbank& bank);

// DCT of log filterbank energies: C_i = sum_j f_j * cos(i*pi/B * (j - 0.5)).
// When append_log_energy is set, a trailing column holds
// ln(sum_i s[i]^2 + eps) of the matching raw frame.
FeatureMatrix mfcc(const FeatureMatrix& fbank_log, int n_ceps,
                   bool append_log_energy,
                   const std::vector<std::vector<double>>& frames);

struct FeatureParams {
  int n_fft = 0;    // 0: derived from FrameConfig.pad_to_pow2
  int n_mels = 0;   // 0: 80 for mel kinds, 23 for mfcc
  int n_ceps = 13;
  bool mfcc_energy = true;
  double f_min_hz = 0.0;
  double f_max_hz = 0.0;  // 0: Nyquist
  double floor_eps = 1e-10;
};

// Full chain for one utterance: frame -> window -> zero fill -> transform ->
// power, then the mel/log/DCT stages the kind calls for.
FeatureMatrix extract(const AudioBuffer& buf, FeatureKind kind,
                      const FrameConfig& cfg, const WindowSpec& win,
                      const FeatureParams& params = {});

}  // namespace ksr
