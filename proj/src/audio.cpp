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

#include "ksr/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ksr {

namespace {

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void write_u16(std::ostream& os, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::missing_file, "cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> bytes(static_cast<size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) raise(Errc::missing_file, "short read on " + path);
  return bytes;
}

std::vector<double> decode_pcm16(const unsigned char* p, size_t n_bytes) {
  std::vector<double> samples(n_bytes / 2);
  for (size_t i = 0; i < samples.size(); ++i) {
    const int16_t s = static_cast<int16_t>(read_u16(p + 2 * i));
    samples[i] = static_cast<double>(s) / 32768.0;
  }
  return samples;
}

AudioBuffer load_wav_pcm16(const std::string& path) {
  const std::vector<unsigned char> bytes = read_file(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    raise(Errc::malformed_header, path + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t format_code = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_len > bytes.size())
      raise(Errc::malformed_header, path + ": chunk overruns file");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) raise(Errc::malformed_header, path + ": fmt chunk too small");
      format_code = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
      have_data = true;
    }
    // Chunks are word-aligned; odd sizes carry a pad byte.
    pos = body + chunk_len + (chunk_len & 1);
  }

  if (!have_fmt || !have_data)
    raise(Errc::malformed_header, path + ": missing fmt or data chunk");
  if (format_code != 1 || channels != 1 || bits != 16)
    raise(Errc::unsupported_format,
          path + ": expected mono 16-bit PCM (format 1), got format " +
              std::to_string(format_code) + ", " + std::to_string(channels) +
              " ch, " + std::to_string(bits) + " bit");
  if (rate == 0) raise(Errc::malformed_header, path + ": zero sample rate");

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(rate);
  buf.samples = decode_pcm16(bytes.data() + data_off, data_len);
  return buf;
}

}  // namespace

AudioBuffer load_audio(const std::string& path, AudioFormat format,
                       int sample_rate_hint) {
  if (format == AudioFormat::wav_pcm16) return load_wav_pcm16(path);

  if (sample_rate_hint <= 0)
    raise(Errc::missing_rate, "raw PCM input requires a sample rate");
  const std::vector<unsigned char> bytes = read_file(path);
  AudioBuffer buf;
  buf.sample_rate = sample_rate_hint;
  buf.samples = decode_pcm16(bytes.data(), bytes.size());
  return buf;
}

void save_wav(const std::string& path, const AudioBuffer& buf) {
  if (buf.sample_rate <= 0) raise(Errc::bad_argument, "sample rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::missing_file, "cannot write " + path);

  const uint32_t data_len = static_cast<uint32_t>(buf.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(buf.sample_rate));
  write_u32(out, static_cast<uint32_t>(buf.sample_rate) * 2);  // byte rate
  write_u16(out, 2);   // block align
  write_u16(out, 16);  // bits per sample
  out.write("data", 4);
  write_u32(out, data_len);
  for (double x : buf.samples) {
    double q = std::round(x * 32768.0);
    q = std::clamp(q, -32768.0, 32767.0);
    write_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  if (!out) raise(Errc::missing_file, "write failed on " + path);
}

std::pair<AudioBuffer, TrimReport> trim_silence(const AudioBuffer& buf,
                                                double threshold_db,
                                                double window_ms) {
  if (buf.samples.empty()) raise(Errc::empty_input, "trim_silence: empty signal");
  if (threshold_db <= 0) raise(Errc::bad_argument, "threshold_db must be positive");
  if (window_ms <= 0) raise(Errc::bad_argument, "window_ms must be positive");
  if (buf.sample_rate <= 0) raise(Errc::bad_argument, "sample rate must be positive");

  const long long total = static_cast<long long>(buf.samples.size());
  long long win = std::llround(window_ms * buf.sample_rate / 1000.0);
  if (win < 1) win = 1;
  const long long n_windows = (total + win - 1) / win;

  std::vector<double> rms(static_cast<size_t>(n_windows));
  double peak = 0.0;
  for (long long w = 0; w < n_windows; ++w) {
    const long long begin = w * win;
    const long long end = std::min(begin + win, total);
    double acc = 0.0;
    for (long long i = begin; i < end; ++i) acc += buf.samples[i] * buf.samples[i];
    rms[w] = std::sqrt(acc / static_cast<double>(end - begin));
    peak = std::max(peak, rms[w]);
  }

  // A window is silent when 20*log10(rms/peak) < -threshold_db.
  const double floor = peak * std::pow(10.0, -threshold_db / 20.0);
  auto silent = [&](long long w) { return rms[w] < floor; };

  TrimReport report;
  report.threshold_db = threshold_db;

  long long first = 0;
  while (first < n_windows && silent(first)) ++first;
  if (first == n_windows || peak == 0.0) {
    report.all_silent = true;
    report.leading_samples_removed = total;
    return {AudioBuffer{{}, buf.sample_rate}, report};
  }
  long long last = n_windows - 1;
  while (last >= 0 && silent(last)) --last;

  const long long keep_begin = first * win;
  const long long keep_end = std::min((last + 1) * win, total);
  report.leading_samples_removed = keep_begin;
  report.trailing_samples_removed = total - keep_end;

  AudioBuffer out;
  out.sample_rate = buf.sample_rate;
  out.samples.assign(buf.samples.begin() + keep_begin, buf.samples.begin() + keep_end);
  return {std::move(out), report};
}

}  // namespace ksr
