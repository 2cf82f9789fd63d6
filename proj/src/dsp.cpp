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

#include "ksr/dsp.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace ksr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Iterative radix-2 decimation-in-time transform, in place.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -kTwoPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}
}  // namespace

int FrameConfig::frame_len_samples(int sample_rate) const {
  return static_cast<int>(std::llround(frame_len_ms * sample_rate / 1000.0));
}

int FrameConfig::hop_samples(int sample_rate) const {
  return static_cast<int>(std::llround(hop_ms * sample_rate / 1000.0));
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::vector<double>> frame_signal(const AudioBuffer& buf,
                                              const FrameConfig& cfg) {
  if (buf.sample_rate <= 0) raise(Errc::bad_argument, "sample rate must be positive");
  if (cfg.hop_ms <= 0) raise(Errc::bad_argument, "hop_ms must be positive");
  if (cfg.frame_len_ms < cfg.hop_ms)
    raise(Errc::bad_argument, "frame length must be at least the hop");

  const int frame_len = cfg.frame_len_samples(buf.sample_rate);
  const int hop = cfg.hop_samples(buf.sample_rate);
  if (frame_len < 2) raise(Errc::bad_argument, "frame shorter than two samples");
  if (hop < 1) raise(Errc::bad_argument, "hop shorter than one sample");

  const long long total = static_cast<long long>(buf.samples.size());
  if (total < frame_len)
    raise(Errc::too_short, "signal shorter than one frame (" +
                               std::to_string(total) + " < " +
                               std::to_string(frame_len) + " samples)");

  const long long n_frames = (total - frame_len) / hop + 1;
  std::vector<std::vector<double>> frames(static_cast<size_t>(n_frames));
  for (long long t = 0; t < n_frames; ++t) {
    const auto begin = buf.samples.begin() + t * hop;
    frames[static_cast<size_t>(t)].assign(begin, begin + frame_len);
  }
  return frames;
}

std::vector<double> make_window(const WindowSpec& spec, int n) {
  if (n < 2) raise(Errc::degenerate_length, "window length must be at least 2");
  std::vector<double> w(static_cast<size_t>(n));
  if (spec.kind == WindowKind::rectangular) {
    std::fill(w.begin(), w.end(), 1.0);
    return w;
  }
  if (!(spec.a > 0.0 && spec.a < 0.54))
    raise(Errc::bad_argument, "hamming coefficient out of range (0, 0.54)");
  for (int i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] = 0.54 - spec.a * std::cos(kTwoPi * i / (n - 1));
  return w;
}

std::vector<double> zero_pad_pow2(std::vector<double> frame) {
  if (frame.empty()) raise(Errc::empty_input, "cannot pad an empty frame");
  const int n = static_cast<int>(frame.size());
  if (!is_power_of_two(n)) frame.resize(static_cast<size_t>(next_power_of_two(n)), 0.0);
  return frame;
}

ComplexSpectrum fft_real(const std::vector<double>& frame, int n_fft) {
  if (!is_power_of_two(n_fft))
    raise(Errc::not_power_of_two, "fft length " + std::to_string(n_fft) +
                                      " is not a power of two");
  if (static_cast<int>(frame.size()) > n_fft)
    raise(Errc::bad_argument, "frame longer than fft length");

  std::vector<std::complex<double>> a(static_cast<size_t>(n_fft), {0.0, 0.0});
  for (size_t i = 0; i < frame.size(); ++i) a[i] = {frame[i], 0.0};
  fft_inplace(a);

  ComplexSpectrum spec;
  spec.n_fft = n_fft;
  spec.bins.assign(a.begin(), a.begin() + n_fft / 2 + 1);
  return spec;
}

ComplexSpectrum dft_real(const std::vector<double>& frame, int n_fft) {
  if (n_fft < 1) raise(Errc::bad_argument, "fft length must be positive");
  if (static_cast<int>(frame.size()) > n_fft)
    raise(Errc::bad_argument, "frame longer than transform length");

  // Twiddle lookup over (k*n) mod n_fft keeps the direct sum accurate.
  std::vector<std::complex<double>> twiddle(static_cast<size_t>(n_fft));
  for (int i = 0; i < n_fft; ++i) {
    const double ang = -kTwoPi * i / n_fft;
    twiddle[static_cast<size_t>(i)] = {std::cos(ang), std::sin(ang)};
  }

  ComplexSpectrum spec;
  spec.n_fft = n_fft;
  spec.bins.resize(static_cast<size_t>(n_fft / 2 + 1));
  for (int k = 0; k <= n_fft / 2; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t n = 0; n < frame.size(); ++n) {
      const long long idx = (static_cast<long long>(k) * static_cast<long long>(n)) % n_fft;
      acc += frame[n] * twiddle[static_cast<size_t>(idx)];
    }
    spec.bins[static_cast<size_t>(k)] = acc;
  }
  return spec;
}

std::vector<ComplexSpectrum> stft(const AudioBuffer& buf, const FrameConfig& cfg,
                                  const WindowSpec& win, int n_fft_override) {
  std::vector<std::vector<double>> frames = frame_signal(buf, cfg);
  const int frame_len = static_cast<int>(frames.front().size());

  int n_fft = n_fft_override;
  if (n_fft == 0)
    n_fft = cfg.pad_to_pow2 ? next_power_of_two(frame_len) : frame_len;
  if (n_fft < frame_len)
    raise(Errc::bad_argument, "fft length shorter than the frame");

  const std::vector<double> window = make_window(win, frame_len);
  const bool use_fft = is_power_of_two(n_fft);

  std::vector<ComplexSpectrum> spectra;
  spectra.reserve(frames.size());
  for (std::vector<double>& frame : frames) {
    for (int i = 0; i < frame_len; ++i) frame[static_cast<size_t>(i)] *= window[static_cast<size_t>(i)];
    spectra.push_back(use_fft ? fft_real(frame, n_fft) : dft_real(frame, n_fft));
  }
  return spectra;
}

}  // namespace ksr
