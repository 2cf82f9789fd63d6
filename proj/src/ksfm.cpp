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

#include "ksr/ksfm.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <vector>

#include "ksr/common.hpp"

namespace ksr {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint16_t get_u16(const std::string& s, size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

std::uint32_t get_u32(const std::string& s, size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(s[at + static_cast<size_t>(i)]);
  return v;
}

float get_f32(const std::string& s, size_t at) {
  return std::bit_cast<float>(get_u32(s, at));
}

std::uint8_t kind_code(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::spectrogram: return 0;
    case FeatureKind::log_spectrogram: return 1;
    case FeatureKind::mel_spectrogram: return 2;
    case FeatureKind::log_mel_spectrogram: return 3;
    case FeatureKind::fbank: return 4;
    case FeatureKind::mfcc: return 5;
  }
  raise(Errc::wrong_kind, "unencodable feature kind");
}

FeatureKind kind_from_code(std::uint8_t code) {
  switch (code) {
    case 0: return FeatureKind::spectrogram;
    case 1: return FeatureKind::log_spectrogram;
    case 2: return FeatureKind::mel_spectrogram;
    case 3: return FeatureKind::log_mel_spectrogram;
    case 4: return FeatureKind::fbank;
    case 5: return FeatureKind::mfcc;
    default:
      raise(Errc::unsupported_format, "unknown kind code " + std::to_string(code));
  }
}

}  // namespace

void write_ksfm(const std::string& path, const FeatureMatrix& m) {
  std::string bytes;
  bytes.reserve(static_cast<size_t>(kKsfmHeaderBytes) +
                static_cast<size_t>(m.frames()) * static_cast<size_t>(m.dim()) * 4);
  bytes += "KSFM";
  put_u16(bytes, kKsfmVersion);
  bytes.push_back(static_cast<char>(kind_code(m.kind)));
  bytes.push_back('\0');  // reserved
  put_u32(bytes, static_cast<std::uint32_t>(m.frames()));
  put_u32(bytes, static_cast<std::uint32_t>(m.dim()));
  put_u32(bytes, static_cast<std::uint32_t>(m.sample_rate));
  put_f32(bytes, static_cast<float>(m.frame_len_ms));
  put_f32(bytes, static_cast<float>(m.hop_ms));
  for (int r = 0; r < m.frames(); ++r) {
    const double* row = m.data.row(r);
    for (int c = 0; c < m.dim(); ++c) put_f32(bytes, static_cast<float>(row[c]));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::missing_file, "cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) raise(Errc::missing_file, "short write to " + path);
}

FeatureMatrix read_ksfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::missing_file, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (bytes.size() < kKsfmHeaderBytes || bytes.compare(0, 4, "KSFM") != 0)
    raise(Errc::malformed_header, path + " is not a KSFM file");
  if (get_u16(bytes, 4) != kKsfmVersion)
    raise(Errc::unsupported_format,
          "KSFM version " + std::to_string(get_u16(bytes, 4)) + " not supported");

  const FeatureKind kind = kind_from_code(static_cast<std::uint8_t>(bytes[6]));
  const std::uint32_t rows = get_u32(bytes, 8);
  const std::uint32_t cols = get_u32(bytes, 12);
  const std::uint64_t expected =
      static_cast<std::uint64_t>(kKsfmHeaderBytes) +
      static_cast<std::uint64_t>(rows) * cols * 4;
  if (bytes.size() != expected)
    raise(Errc::malformed_header,
          path + ": length " + std::to_string(bytes.size()) + " does not match header (" +
              std::to_string(expected) + " expected)");

  FeatureMatrix m;
  m.kind = kind;
  m.sample_rate = static_cast<int>(get_u32(bytes, 16));
  m.frame_len_ms = get_f32(bytes, 20);
  m.hop_ms = get_f32(bytes, 24);
  m.data = Matrix(static_cast<int>(rows), static_cast<int>(cols));
  size_t at = kKsfmHeaderBytes;
  for (std::uint32_t r = 0; r < rows; ++r) {
    double* row = m.data.row(static_cast<int>(r));
    for (std::uint32_t c = 0; c < cols; ++c, at += 4) row[c] = get_f32(bytes, at);
  }
  return m;
}

}  // namespace ksr
