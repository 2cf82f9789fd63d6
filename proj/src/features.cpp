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

#include "ksr/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ksr {

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::spectrogram: return "spectrogram";
    case FeatureKind::log_spectrogram: return "log_spectrogram";
    case FeatureKind::mel_spectrogram: return "mel_spectrogram";
    case FeatureKind::log_mel_spectrogram: return "log_mel_spectrogram";
    case FeatureKind::fbank: return "fbank";
    case FeatureKind::mfcc: return "mfcc";
  }
  return "unknown";
}

FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "spectrogram") return FeatureKind::spectrogram;
  if (name == "logspec" || name == "log_spectrogram") return FeatureKind::log_spectrogram;
  if (name == "melspec" || name == "mel_spectrogram") return FeatureKind::mel_spectrogram;
  if (name == "logmel" || name == "log_mel_spectrogram") return FeatureKind::log_mel_spectrogram;
  if (name == "fbank") return FeatureKind::fbank;
  if (name == "mfcc") return FeatureKind::mfcc;
  raise(Errc::bad_argument, "unknown feature kind: " + name);
}

double hz_to_mel(double f_hz) {
  if (f_hz < 0.0) raise(Errc::negative_frequency, "frequency must be non-negative");
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) {
  if (mel < 0.0) raise(Errc::negative_mel, "mel value must be non-negative");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

FeatureMatrix power_spectrogram(const std::vector<ComplexSpectrum>& spectra,
                                const FrameConfig& cfg, int sample_rate) {
  if (spectra.empty()) raise(Errc::empty_input, "no spectra");
  const size_t bins = spectra.front().bins.size();
  for (const ComplexSpectrum& s : spectra)
    if (s.bins.size() != bins)
      raise(Errc::ragged_input, "spectra differ in bin count");

  FeatureMatrix out;
  out.kind = FeatureKind::spectrogram;
  out.frame_len_ms = cfg.frame_len_ms;
  out.hop_ms = cfg.hop_ms;
  out.sample_rate = sample_rate;
  out.data = Matrix(static_cast<int>(spectra.size()), static_cast<int>(bins));
  for (size_t t = 0; t < spectra.size(); ++t) {
    double* row = out.data.row(static_cast<int>(t));
    for (size_t k = 0; k < bins; ++k) {
      const std::complex<double>& z = spectra[t].bins[k];
      row[k] = z.real() * z.real() + z.imag() * z.imag();
    }
  }
  return out;
}

FeatureMatrix log_compress(const FeatureMatrix& m, double floor_eps) {
  FeatureKind log_kind;
  switch (m.kind) {
    case FeatureKind::spectrogram: log_kind = FeatureKind::log_spectrogram; break;
    case FeatureKind::mel_spectrogram:
    case FeatureKind::fbank: log_kind = FeatureKind::log_mel_spectrogram; break;
    default:
      raise(Errc::wrong_kind, std::string("cannot log-compress ") + feature_kind_name(m.kind));
  }
  if (floor_eps <= 0.0) raise(Errc::bad_argument, "floor_eps must be positive");

  FeatureMatrix out = m;
  out.kind = log_kind;
  for (double& v : out.data.data()) v = std::log(std::max(v, floor_eps));
  return out;
}

MelFilterbank build_mel_filterbank(int b_count, int n_fft, int sample_rate,
                                   double f_min_hz, double f_max_hz) {
  if (b_count < 1) raise(Errc::bad_argument, "need at least one filter");
  if (n_fft < 2 || sample_rate <= 0) raise(Errc::bad_argument, "bad fft length or rate");
  const double nyquist = sample_rate / 2.0;
  if (f_min_hz < 0.0 || f_max_hz <= f_min_hz || f_max_hz > nyquist)
    raise(Errc::bad_band, "band edges must satisfy 0 <= f_min < f_max <= Nyquist");

  MelFilterbank bank;
  bank.b_count = b_count;
  bank.f_min_hz = f_min_hz;
  bank.f_max_hz = f_max_hz;
  bank.n_fft = n_fft;
  bank.sample_rate = sample_rate;

  const double mel_lo = hz_to_mel(f_min_hz);
  const double mel_hi = hz_to_mel(f_max_hz);
  const int n_edges = b_count + 2;
  bank.edge_freqs_hz.resize(static_cast<size_t>(n_edges));
  std::vector<double> edge_bins(static_cast<size_t>(n_edges));
  const double hz_per_bin = static_cast<double>(sample_rate) / n_fft;
  for (int i = 0; i < n_edges; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (n_edges - 1);
    const double hz = mel_to_hz(mel);
    bank.edge_freqs_hz[static_cast<size_t>(i)] = hz;
    edge_bins[static_cast<size_t>(i)] = hz / hz_per_bin;
  }

  const int n_bins = n_fft / 2 + 1;
  bank.weights = Matrix(b_count, n_bins);
  for (int b = 0; b < b_count; ++b) {
    const double left = edge_bins[static_cast<size_t>(b)];
    const double center = edge_bins[static_cast<size_t>(b + 1)];
    const double right = edge_bins[static_cast<size_t>(b + 2)];
    bool any = false;
    for (int k = 0; k < n_bins; ++k) {
      double w = 0.0;
      if (k > left && k < center) {
        w = (k - left) / (center - left);
      } else if (k == center) {
        w = 1.0;
      } else if (k > center && k < right) {
        w = (right - k) / (right - center);
      }
      bank.weights(b, k) = w;
      any = any || w > 0.0;
    }
    if (!any)
      raise(Errc::too_many_filters,
            "filter " + std::to_string(b) + " has no FFT bin inside its band; "
            "reduce the filter count or enlarge n_fft");
  }
  return bank;
}

FeatureMatrix fbank_energies(const FeatureMatrix& spec, const MelFilterbank& bank) {
  if (spec.kind != FeatureKind::spectrogram)
    raise(Errc::wrong_kind, "fbank_energies expects a power spectrogram");
  if (spec.dim() != bank.weights.cols())
    raise(Errc::dimension_mismatch,
          "spectrogram has " + std::to_string(spec.dim()) + " bins, bank expects " +
              std::to_string(bank.weights.cols()));

  FeatureMatrix out;
  out.kind = FeatureKind::fbank;
  out.frame_len_ms = spec.frame_len_ms;
  out.hop_ms = spec.hop_ms;
  out.sample_rate = spec.sample_rate;
  out.data = Matrix(spec.frames(), bank.b_count);
  for (int t = 0; t < spec.frames(); ++t) {
    const double* in = spec.data.row(t);
    double* row = out.data.row(t);
    for (int b = 0; b < bank.b_count; ++b) {
      const double* w = bank.weights.row(b);
      double acc = 0.0;
      for (int k = 0; k < bank.weights.cols(); ++k) acc += w[k] * in[k];
      row[b] = acc;
    }
  }
  return out;
}

FeatureMatrix mfcc(const FeatureMatrix& fbank_log, int n_ceps,
                   bool append_log_energy,
                   const std::vector<std::vector<double>>& frames) {
  if (fbank_log.kind != FeatureKind::log_mel_spectrogram)
    raise(Errc::wrong_kind, "mfcc expects log filterbank energies");
  const int n_filters = fbank_log.dim();
  if (n_ceps < 1 || n_ceps > n_filters)
    raise(Errc::too_many_ceps, "n_ceps must lie in [1, filter count]");
  if (append_log_energy && static_cast<int>(frames.size()) != fbank_log.frames())
    raise(Errc::dimension_mismatch, "frame count does not match feature rows");

  constexpr double kEnergyEps = 1e-10;
  const int out_dim = n_ceps + (append_log_energy ? 1 : 0);

  FeatureMatrix out;
  out.kind = FeatureKind::mfcc;
  out.frame_len_ms = fbank_log.frame_len_ms;
  out.hop_ms = fbank_log.hop_ms;
  out.sample_rate = fbank_log.sample_rate;
  out.data = Matrix(fbank_log.frames(), out_dim);

  for (int t = 0; t < fbank_log.frames(); ++t) {
    const double* f = fbank_log.data.row(t);
    double* row = out.data.row(t);
    for (int i = 0; i < n_ceps; ++i) {
      double acc = 0.0;
      for (int j = 1; j <= n_filters; ++j)
        acc += f[j - 1] * std::cos(i * std::numbers::pi / n_filters * (j - 0.5));
      row[i] = acc;
    }
    if (append_log_energy) {
      double energy = 0.0;
      for (double s : frames[static_cast<size_t>(t)]) energy += s * s;
      row[n_ceps] = std::log(energy + kEnergyEps);
    }
  }
  return out;
}

FeatureMatrix extract(const AudioBuffer& buf, FeatureKind kind,
                      const FrameConfig& cfg, const WindowSpec& win,
                      const FeatureParams& params) {
  const int frame_len = cfg.frame_len_samples(buf.sample_rate);

  int n_fft = params.n_fft;
  if (n_fft == 0) n_fft = cfg.pad_to_pow2 ? next_power_of_two(frame_len) : frame_len;

  const bool mel_kind = kind == FeatureKind::mel_spectrogram ||
                        kind == FeatureKind::log_mel_spectrogram ||
                        kind == FeatureKind::fbank;
  int n_mels = params.n_mels;
  if (n_mels == 0) n_mels = kind == FeatureKind::mfcc ? 23 : 80;
  const double f_max = params.f_max_hz > 0.0 ? params.f_max_hz : buf.sample_rate / 2.0;

  std::vector<std::vector<double>> frames = frame_signal(buf, cfg);
  const std::vector<double> window = make_window(win, frame_len);
  const bool use_fft = is_power_of_two(n_fft);

  std::vector<ComplexSpectrum> spectra;
  spectra.reserve(frames.size());
  for (const std::vector<double>& frame : frames) {
    std::vector<double> windowed(frame.size());
    for (size_t i = 0; i < frame.size(); ++i) windowed[i] = frame[i] * window[i];
    spectra.push_back(use_fft ? fft_real(windowed, n_fft) : dft_real(windowed, n_fft));
  }

  FeatureMatrix spec = power_spectrogram(spectra, cfg, buf.sample_rate);
  if (kind == FeatureKind::spectrogram) return spec;
  if (kind == FeatureKind::log_spectrogram) return log_compress(spec, params.floor_eps);

  const MelFilterbank bank =
      build_mel_filterbank(n_mels, n_fft, buf.sample_rate, params.f_min_hz, f_max);
  FeatureMatrix energies = fbank_energies(spec, bank);
  if (kind == FeatureKind::fbank) return energies;
  if (mel_kind) {
    if (kind == FeatureKind::mel_spectrogram) {
      energies.kind = FeatureKind::mel_spectrogram;
      return energies;
    }
    return log_compress(energies, params.floor_eps);
  }

  // mfcc
  FeatureMatrix logged = log_compress(energies, params.floor_eps);
  return mfcc(logged, params.n_ceps, params.mfcc_energy, frames);
}

}  // namespace ksr
