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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ksr/dsp.hpp"
#include "ksr/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using ksr::AudioBuffer;
using ksr::Errc;
using ksr::FrameConfig;
using ksr::WindowSpec;
using testutil::code_of;

namespace {

AudioBuffer make_buffer(std::vector<double> samples, int rate = 16000) {
  return AudioBuffer{std::move(samples), rate};
}

std::vector<double> random_frame(ksr::SplitMix64& g, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = oracle::uniform(g, -1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("framing drops the incomplete tail") {
  // 1 s at 16 kHz with 20/10 ms -> floor((16000-320)/160)+1 = 99 frames.
  auto frames = ksr::frame_signal(make_buffer(std::vector<double>(16000, 0.1)), {});
  CHECK(frames.size() == 99);
  for (const auto& f : frames) CHECK(f.size() == 320);

  // Exactly one frame when L == N.
  frames = ksr::frame_signal(make_buffer(std::vector<double>(320, 0.1)), {});
  CHECK(frames.size() == 1);

  // L = 1000 at 20/10 ms -> floor((1000-320)/160)+1 = 5 frames; the last one
  // starts at sample 640 and samples 960..999 are dropped.
  std::vector<double> ramp(1000);
  for (int i = 0; i < 1000; ++i) ramp[static_cast<size_t>(i)] = i;
  frames = ksr::frame_signal(make_buffer(ramp), {});
  REQUIRE(frames.size() == 5);
  CHECK(frames.back().front() == 640.0);
  CHECK(frames.back().back() == 959.0);

  CHECK(code_of([&] { ksr::frame_signal(make_buffer(std::vector<double>(100, 0.1)), {}); }) ==
        Errc::too_short);
}

TEST_CASE("hamming window values and symmetry") {
  auto w = ksr::make_window(WindowSpec::hamming_paper(), 320);
  REQUIRE(w.size() == 320);
  // Endpoints: 0.54 - 0.45*cos(0) = 0.09.
  CHECK(w.front() == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(w.back() == doctest::Approx(0.09).epsilon(1e-12));
  // Near-center maximum: 0.54 + 0.45 = 0.99 up to the cos grid (N=320 is
  // even, so no sample lands exactly on the midpoint).
  double peak = 0.0;
  for (double x : w) peak = std::max(peak, x);
  CHECK(peak == doctest::Approx(0.99).epsilon(1e-4));
  CHECK(peak < 0.99);
  // An odd length has a true center sample: w((N-1)/2) = 0.54 + 0.45 exactly.
  auto odd = ksr::make_window(WindowSpec::hamming_paper(), 321);
  CHECK(odd[160] == doctest::Approx(0.99).epsilon(1e-15));
  // w(n) == w(N-1-n) exactly would need symmetric cos evaluation; the float
  // results still agree to machine precision for this N.
  for (int n = 0; n < 320; ++n)
    CHECK(w[static_cast<size_t>(n)] ==
          doctest::Approx(w[static_cast<size_t>(319 - n)]).epsilon(1e-12));
}

TEST_CASE("standard hamming matches direct formula evaluation") {
  // Freeze w(n) = 0.54 - 0.46*cos(2*pi*n/(N-1)) evaluated directly. For N=5
  // that gives w(1) = 0.54 - 0.46*cos(pi/2) = 0.54, not a taper to 0.31 —
  // the formula is the contract here.
  auto w = ksr::make_window(WindowSpec::hamming_standard(), 5);
  REQUIRE(w.size() == 5);
  const double pi = std::numbers::pi;
  for (int n = 0; n < 5; ++n) {
    const double direct = 0.54 - 0.46 * std::cos(2.0 * pi * n / 4.0);
    CHECK(w[static_cast<size_t>(n)] == doctest::Approx(direct).epsilon(1e-15));
  }
  CHECK(w[0] == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.54).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rectangular and degenerate windows") {
  auto w = ksr::make_window(WindowSpec::rectangular(), 7);
  for (double x : w) CHECK(x == 1.0);
  // The formula divides by N-1, so lengths below 2 are rejected.
  CHECK(code_of([&] { ksr::make_window(WindowSpec::hamming_paper(), 1); }) ==
        Errc::degenerate_length);
  CHECK(code_of([&] { ksr::make_window(WindowSpec::hamming_paper(), 0); }) ==
        Errc::degenerate_length);
}

TEST_CASE("zero padding to the next power of two") {
  std::vector<double> frame(320, 1.0);
  auto padded = ksr::zero_pad_pow2(frame);
  REQUIRE(padded.size() == 512);
  for (int i = 0; i < 320; ++i) CHECK(padded[static_cast<size_t>(i)] == 1.0);
  for (int i = 320; i < 512; ++i) CHECK(padded[static_cast<size_t>(i)] == 0.0);

  CHECK(ksr::zero_pad_pow2(std::vector<double>(256, 2.0)).size() == 256);
  CHECK(ksr::zero_pad_pow2(std::vector<double>(400, 2.0)).size() == 512);
}

TEST_CASE("fft basics: zero, impulse, power-of-two guard") {
  auto zero = ksr::fft_real(std::vector<double>(8, 0.0), 8);
  REQUIRE(zero.bins.size() == 5);
  for (const auto& b : zero.bins) CHECK(std::abs(b) == 0.0);

  // A unit impulse at n=0 has a flat spectrum of exactly 1+0i.
  std::vector<double> impulse(8, 0.0);
  impulse[0] = 1.0;
  auto sp = ksr::fft_real(impulse, 8);
  REQUIRE(sp.bins.size() == 5);
  for (const auto& b : sp.bins) {
    CHECK(b.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.imag() == doctest::Approx(0.0).epsilon(1e-15));
  }

  CHECK(code_of([&] { ksr::fft_real(std::vector<double>(12, 1.0), 12); }) ==
        Errc::not_power_of_two);
}

TEST_CASE("fft agrees with the direct-sum transform on random frames") {
  ksr::SplitMix64 g(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n_fft = 1 << (5 + static_cast<int>(g.below(4)));  // 32..256
    auto frame = random_frame(g, n_fft);
    auto fast = ksr::fft_real(frame, n_fft);
    auto slow = oracle::dft(frame, n_fft);
    REQUIRE(fast.bins.size() == slow.size());
    for (size_t k = 0; k < slow.size(); ++k)
      CHECK(std::abs(fast.bins[k] - slow[k]) < 1e-6);
  }
}

TEST_CASE("direct transform handles non-power-of-two lengths") {
  ksr::SplitMix64 g(13);
  auto frame = random_frame(g, 320);
  auto sp = ksr::dft_real(frame, 320);
  REQUIRE(sp.bins.size() == 161);
  auto slow = oracle::dft(frame, 320);
  for (size_t k = 0; k < slow.size(); ++k) CHECK(std::abs(sp.bins[k] - slow[k]) < 1e-9);
}

TEST_CASE("transform linearity") {
  ksr::SplitMix64 g(17);
  auto x = random_frame(g, 64);
  auto y = random_frame(g, 64);
  const double a = 0.7, b = -1.3;
  std::vector<double> mix(64);
  for (int i = 0; i < 64; ++i)
    mix[static_cast<size_t>(i)] =
        a * x[static_cast<size_t>(i)] + b * y[static_cast<size_t>(i)];
  auto fx = ksr::fft_real(x, 64);
  auto fy = ksr::fft_real(y, 64);
  auto fm = ksr::fft_real(mix, 64);
  for (size_t k = 0; k < fm.bins.size(); ++k)
    CHECK(std::abs(fm.bins[k] - (a * fx.bins[k] + b * fy.bins[k])) < 1e-9);
}

TEST_CASE("energy is preserved between time and frequency domains") {
  // With only the non-redundant half kept, Parseval reads
  // sum x^2 = (|X_0|^2 + |X_{n/2}|^2 + 2*sum_{0<k<n/2} |X_k|^2)/n.
  ksr::SplitMix64 g(19);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_frame(g, 128);
    double time_e = 0.0;
    for (double v : x) time_e += v * v;
    auto sp = ksr::fft_real(x, 128);
    double freq_e = std::norm(sp.bins.front()) + std::norm(sp.bins.back());
    for (size_t k = 1; k + 1 < sp.bins.size(); ++k) freq_e += 2.0 * std::norm(sp.bins[k]);
    freq_e /= 128.0;
    CHECK(std::abs(time_e - freq_e) / time_e < 1e-9);
  }
}

TEST_CASE("stft shape and tone localization") {
  // Zero signal -> all-zero spectra at the expected shape.
  auto spectra = ksr::stft(make_buffer(std::vector<double>(16000, 0.0)), {},
                           WindowSpec::hamming_paper());
  REQUIRE(spectra.size() == 99);
  for (const auto& sp : spectra) {
    REQUIRE(sp.bins.size() == 257);  // 320 padded to 512 -> 512/2+1
    for (const auto& b : sp.bins) CHECK(std::abs(b) == 0.0);
  }

  // A 1 kHz tone at 16 kHz with n_fft=512 peaks at bin 1000/(16000/512) = 32.
  std::vector<double> tone(16000);
  const double pi = std::numbers::pi;
  for (int i = 0; i < 16000; ++i)
    tone[static_cast<size_t>(i)] = std::sin(2.0 * pi * 1000.0 * i / 16000.0);
  spectra = ksr::stft(make_buffer(tone), {}, WindowSpec::hamming_paper());
  for (const auto& sp : spectra) {
    size_t argmax = 0;
    for (size_t k = 1; k < sp.bins.size(); ++k)
      if (std::abs(sp.bins[k]) > std::abs(sp.bins[argmax])) argmax = k;
    CHECK(argmax == 32);
  }

  // Explicit n_fft override keeps the unpadded bin count.
  FrameConfig cfg;
  cfg.pad_to_pow2 = false;
  spectra = ksr::stft(make_buffer(tone), cfg, WindowSpec::hamming_paper());
  REQUIRE(spectra.size() == 99);
  CHECK(spectra.front().bins.size() == 161);
}
