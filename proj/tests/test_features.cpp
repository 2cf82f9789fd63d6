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
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ksr/features.hpp"
#include "ksr/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using ksr::Errc;
using ksr::FeatureKind;
using ksr::FeatureMatrix;
using ksr::FrameConfig;
using ksr::Matrix;
using ksr::WindowSpec;
using testutil::code_of;

namespace {

ksr::AudioBuffer noise_buffer(int n, uint64_t seed, int rate = 16000) {
  ksr::SplitMix64 g(seed);
  std::vector<double> s(static_cast<size_t>(n));
  for (auto& x : s) x = oracle::uniform(g, -0.5, 0.5);
  return {std::move(s), rate};
}

FeatureMatrix random_power_spec(int frames, int bins, uint64_t seed) {
  FeatureMatrix m;
  m.kind = FeatureKind::spectrogram;
  m.frame_len_ms = 20.0;
  m.hop_ms = 10.0;
  m.sample_rate = 16000;
  m.data = Matrix(frames, bins);
  ksr::SplitMix64 g(seed);
  for (int t = 0; t < frames; ++t)
    for (int k = 0; k < bins; ++k) m.data(t, k) = oracle::uniform(g, 0.0, 4.0);
  return m;
}

}  // namespace

TEST_CASE("mel scale reference points and inversion") {
  CHECK(ksr::hz_to_mel(0.0) == 0.0);
  // 2595*log10(1 + 1000/700)
  CHECK(ksr::hz_to_mel(1000.0) == doctest::Approx(999.9855371).epsilon(1e-9));
  CHECK(ksr::hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));

  ksr::SplitMix64 g(23);
  for (int i = 0; i < 200; ++i) {
    const double f = oracle::uniform(g, 0.0, 8000.0);
    CHECK(std::abs(ksr::mel_to_hz(ksr::hz_to_mel(f)) - f) < 1e-6);
  }
  CHECK(code_of([] { ksr::hz_to_mel(-1.0); }) == Errc::negative_frequency);
  CHECK(code_of([] { ksr::mel_to_hz(-0.5); }) == Errc::negative_mel);
}

TEST_CASE("power spectrogram squares magnitudes") {
  ksr::ComplexSpectrum sp;
  sp.n_fft = 8;
  sp.bins = {{3.0, 4.0}, {1.0, 0.0}, {0.0, 2.0}, {0.0, 0.0}, {-1.0, -1.0}};
  auto m = ksr::power_spectrogram({sp}, {}, 16000);
  REQUIRE(m.frames() == 1);
  REQUIRE(m.dim() == 5);
  CHECK(m.data(0, 0) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(m.data(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.data(0, 2) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m.data(0, 3) == 0.0);
  CHECK(m.data(0, 4) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m.kind == FeatureKind::spectrogram);

  ksr::ComplexSpectrum other = sp;
  other.bins.push_back({1.0, 0.0});
  CHECK(code_of([&] { ksr::power_spectrogram({sp, other}, {}, 16000); }) ==
        Errc::ragged_input);
}

TEST_CASE("log compression floors then takes the natural log") {
  FeatureMatrix m = random_power_spec(1, 3, 29);
  m.data(0, 0) = std::numbers::e;
  m.data(0, 1) = 0.0;      // below the floor
  m.data(0, 2) = 1.0;
  auto lg = ksr::log_compress(m, 1e-10);
  CHECK(lg.data(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lg.data(0, 1) == doctest::Approx(std::log(1e-10)).epsilon(1e-12));
  CHECK(lg.data(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lg.kind == FeatureKind::log_spectrogram);

  // exp undoes the compression wherever the floor was not hit.
  FeatureMatrix r = random_power_spec(4, 9, 31);
  auto lr = ksr::log_compress(r, 1e-10);
  for (int t = 0; t < 4; ++t)
    for (int k = 0; k < 9; ++k)
      if (r.data(t, k) > 1e-10)
        CHECK(std::exp(lr.data(t, k)) == doctest::Approx(r.data(t, k)).epsilon(1e-12));

  // Log of a log is not a defined feature.
  CHECK(code_of([&] { ksr::log_compress(lr); }) == Errc::wrong_kind);
}

TEST_CASE("mel filterbank construction") {
  // A single filter spans the full band as one triangle with peak 1.
  auto bank1 = ksr::build_mel_filterbank(1, 512, 16000, 0.0, 8000.0);
  REQUIRE(bank1.weights.rows() == 1);
  REQUIRE(bank1.weights.cols() == 257);
  REQUIRE(bank1.edge_freqs_hz.size() == 3);
  double peak = 0.0;
  for (int k = 0; k < 257; ++k) peak = std::max(peak, bank1.weights(0, k));
  CHECK(peak <= 1.0);
  CHECK(peak > 0.95);
  CHECK(bank1.weights(0, 0) == doctest::Approx(0.0));
  CHECK(bank1.weights(0, 256) == doctest::Approx(0.0));

  // Edges are equally spaced in mel, not in Hz.
  auto bank = ksr::build_mel_filterbank(23, 512, 16000, 0.0, 8000.0);
  REQUIRE(bank.edge_freqs_hz.size() == 25);
  const double mel_hi = ksr::hz_to_mel(8000.0);
  for (size_t i = 0; i < bank.edge_freqs_hz.size(); ++i) {
    const double expected_mel = mel_hi * static_cast<double>(i) / 24.0;
    CHECK(std::abs(ksr::hz_to_mel(bank.edge_freqs_hz[i]) - expected_mel) < 1e-9);
  }
  // Hz spacing grows with frequency (log-like warp).
  CHECK(bank.edge_freqs_hz[1] - bank.edge_freqs_hz[0] <
        bank.edge_freqs_hz[24] - bank.edge_freqs_hz[23]);

  // Every bin inside the band is covered by at least one filter at B=80.
  auto bank80 = ksr::build_mel_filterbank(80, 512, 16000, 0.0, 8000.0);
  for (int k = 1; k < 256; ++k) {
    double col = 0.0;
    for (int b = 0; b < 80; ++b) col += bank80.weights(b, k);
    CHECK(col > 0.0);
  }
  // And no filter row is empty.
  for (int b = 0; b < 80; ++b) {
    double row = 0.0;
    for (int k = 0; k < 257; ++k) row += bank80.weights(b, k);
    CHECK(row > 0.0);
  }
}

TEST_CASE("mel filterbank rejects unresolvable configurations") {
  // 100 filters over 33 usable bins leaves triangles with no interior bin.
  CHECK(code_of([] { ksr::build_mel_filterbank(100, 64, 16000, 0.0, 8000.0); }) ==
        Errc::too_many_filters);
  CHECK(code_of([] { ksr::build_mel_filterbank(10, 512, 16000, 4000.0, 3000.0); }) ==
        Errc::bad_band);
  CHECK(code_of([] { ksr::build_mel_filterbank(10, 512, 16000, 0.0, 9000.0); }) ==
        Errc::bad_band);
  CHECK(code_of([] { ksr::build_mel_filterbank(10, 512, 16000, -1.0, 8000.0); }) ==
        Errc::bad_band);
}

TEST_CASE("filterbank energies match a direct double loop") {
  auto spec = random_power_spec(7, 257, 37);
  auto bank = ksr::build_mel_filterbank(23, 512, 16000, 0.0, 8000.0);
  auto fb = ksr::fbank_energies(spec, bank);
  REQUIRE(fb.frames() == 7);
  REQUIRE(fb.dim() == 23);
  CHECK(fb.kind == FeatureKind::fbank);
  for (int t = 0; t < 7; ++t) {
    for (int b = 0; b < 23; ++b) {
      double acc = 0.0;
      for (int k = 0; k < 257; ++k) acc += bank.weights(b, k) * spec.data(t, k);
      CHECK(std::abs(fb.data(t, b) - acc) < 1e-12);
    }
  }

  auto narrow = random_power_spec(7, 129, 41);
  CHECK(code_of([&] { ksr::fbank_energies(narrow, bank); }) == Errc::dimension_mismatch);
  CHECK(code_of([&] { ksr::fbank_energies(fb, bank); }) == Errc::wrong_kind);
}

TEST_CASE("cepstral transform of a constant log spectrum") {
  // With f_j = c for all j: C_0 = B*c and the cosine sums cancel for i >= 1.
  const int B = 23;
  const double c = 0.7;
  FeatureMatrix lg;
  lg.kind = FeatureKind::log_mel_spectrogram;
  lg.frame_len_ms = 20.0;
  lg.hop_ms = 10.0;
  lg.sample_rate = 16000;
  lg.data = Matrix(1, B, c);
  auto m = ksr::mfcc(lg, 13, false, {});
  REQUIRE(m.frames() == 1);
  REQUIRE(m.dim() == 13);
  CHECK(m.data(0, 0) == doctest::Approx(B * c).epsilon(1e-12));
  for (int i = 1; i < 13; ++i) CHECK(std::abs(m.data(0, i)) < 1e-9);
  CHECK(m.kind == FeatureKind::mfcc);
}

TEST_CASE("cepstral transform matches the naive cosine sum") {
  const int B = 23, T = 5;
  FeatureMatrix lg;
  lg.kind = FeatureKind::log_mel_spectrogram;
  lg.frame_len_ms = 20.0;
  lg.hop_ms = 10.0;
  lg.sample_rate = 16000;
  lg.data = Matrix(T, B);
  ksr::SplitMix64 g(43);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < B; ++j) lg.data(t, j) = oracle::uniform(g, -3.0, 3.0);

  std::vector<std::vector<double>> frames(T);
  for (auto& f : frames) {
    f.resize(320);
    for (auto& x : f) x = oracle::uniform(g, -1.0, 1.0);
  }

  auto m = ksr::mfcc(lg, 13, true, frames);
  REQUIRE(m.dim() == 14);

  const double pi = std::numbers::pi;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < 13; ++i) {
      double acc = 0.0;
      for (int j = 1; j <= B; ++j)
        acc += lg.data(t, j - 1) * std::cos(i * pi / B * (j - 0.5));
      CHECK(std::abs(m.data(t, i) - acc) < 1e-9);
    }
    // Last column: log energy of the raw frame.
    double e = 0.0;
    for (double x : frames[static_cast<size_t>(t)]) e += x * x;
    CHECK(m.data(t, 13) == doctest::Approx(std::log(e + 1e-10)).epsilon(1e-12));
    // C_0 equals the plain sum of the log energies.
    double sum = 0.0;
    for (int j = 0; j < B; ++j) sum += lg.data(t, j);
    CHECK(m.data(t, 0) == doctest::Approx(sum).epsilon(1e-9));
  }

  CHECK(code_of([&] { ksr::mfcc(lg, 24, false, {}); }) == Errc::too_many_ceps);
  CHECK(code_of([&] { ksr::mfcc(lg, 0, false, {}); }) == Errc::too_many_ceps);
  CHECK(code_of([&] { ksr::mfcc(lg, 13, true, {}); }) == Errc::dimension_mismatch);
  CHECK(code_of([&] { ksr::mfcc(random_power_spec(1, B, 5), 13, false, {}); }) ==
        Errc::wrong_kind);
}

TEST_CASE("end-to-end extraction shapes for one second of audio") {
  auto buf = noise_buffer(16000, 47);

  FrameConfig unpadded;
  unpadded.pad_to_pow2 = false;
  auto spec = ksr::extract(buf, FeatureKind::log_spectrogram, unpadded,
                           WindowSpec::hamming_paper());
  CHECK(spec.frames() == 99);
  CHECK(spec.dim() == 161);

  auto fb = ksr::extract(buf, FeatureKind::fbank, {}, WindowSpec::hamming_paper());
  CHECK(fb.frames() == 99);
  CHECK(fb.dim() == 80);
  CHECK(fb.kind == FeatureKind::fbank);

  auto logmel = ksr::extract(buf, FeatureKind::log_mel_spectrogram, {},
                             WindowSpec::hamming_paper());
  CHECK(logmel.dim() == 80);

  // 40-coefficient cepstra from 40 filters, no energy column.
  ksr::FeatureParams p40;
  p40.n_mels = 40;
  p40.n_ceps = 40;
  p40.mfcc_energy = false;
  auto m40 = ksr::extract(buf, FeatureKind::mfcc, {}, WindowSpec::hamming_paper(), p40);
  CHECK(m40.frames() == 99);
  CHECK(m40.dim() == 40);

  auto m13 = ksr::extract(buf, FeatureKind::mfcc, {}, WindowSpec::hamming_paper());
  CHECK(m13.dim() == 14);  // 13 cepstra + energy

  for (const auto& fm : {spec, fb, logmel, m40, m13})
    for (double v : fm.data.data()) CHECK(std::isfinite(v));
}

TEST_CASE("feature scaling under amplitude change") {
  // Power features scale by alpha^2; log features shift by 2*ln(alpha).
  auto buf = noise_buffer(8000, 53);
  ksr::AudioBuffer doubled = buf;
  for (auto& x : doubled.samples) x *= 2.0;

  auto p1 = ksr::extract(buf, FeatureKind::spectrogram, {}, WindowSpec::hamming_paper());
  auto p2 = ksr::extract(doubled, FeatureKind::spectrogram, {}, WindowSpec::hamming_paper());
  for (int t = 0; t < p1.frames(); ++t)
    for (int k = 0; k < p1.dim(); ++k)
      if (p1.data(t, k) > 1e-12)
        CHECK(p2.data(t, k) / p1.data(t, k) == doctest::Approx(4.0).epsilon(1e-9));

  auto l1 = ksr::extract(buf, FeatureKind::log_mel_spectrogram, {},
                         WindowSpec::hamming_paper());
  auto l2 = ksr::extract(doubled, FeatureKind::log_mel_spectrogram, {},
                         WindowSpec::hamming_paper());
  const double shift = 2.0 * std::log(2.0);
  for (int t = 0; t < l1.frames(); ++t)
    for (int k = 0; k < l1.dim(); ++k)
      CHECK(l2.data(t, k) - l1.data(t, k) == doctest::Approx(shift).epsilon(1e-6));
}

TEST_CASE("mel spectrogram and fbank carry the same numbers") {
  auto buf = noise_buffer(8000, 59);
  auto mel = ksr::extract(buf, FeatureKind::mel_spectrogram, {}, WindowSpec::hamming_paper());
  auto fb = ksr::extract(buf, FeatureKind::fbank, {}, WindowSpec::hamming_paper());
  REQUIRE(mel.frames() == fb.frames());
  REQUIRE(mel.dim() == fb.dim());
  CHECK(mel.kind == FeatureKind::mel_spectrogram);
  for (int t = 0; t < mel.frames(); ++t)
    for (int k = 0; k < mel.dim(); ++k) CHECK(mel.data(t, k) == fb.data(t, k));
}

TEST_CASE("feature kind names round trip") {
  for (auto kind : {FeatureKind::spectrogram, FeatureKind::log_spectrogram,
                    FeatureKind::mel_spectrogram, FeatureKind::log_mel_spectrogram,
                    FeatureKind::fbank, FeatureKind::mfcc})
    CHECK(ksr::feature_kind_from_name(ksr::feature_kind_name(kind)) == kind);
  CHECK(code_of([] { ksr::feature_kind_from_name("plp"); }) == Errc::bad_argument);
}
