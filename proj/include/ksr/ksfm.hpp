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

#include "ksr/features.hpp"

namespace ksr {

// KSFM: the on-disk feature container.  Fixed little-endian layout:
//
//   offset  size  field
//        0     4  magic "KSFM"
//        4     2  version (u16, currently 1)
//        6     1  kind code (u8: 0 spectrogram, 1 log_spectrogram,
//                 2 mel_spectrogram, 3 log_mel_spectrogram, 4 fbank, 5 mfcc)
//        7     1  reserved (0)
//        8     4  rows (u32)
//       12     4  cols (u32)
//       16     4  sample_rate (u32)
//       20     4  frame_len_ms (f32)
//       24     4  hop_ms (f32)
//       28     -  rows*cols f32 payload, row-major
//
// The reader rejects any file whose byte length differs from
// 28 + rows*cols*4 exactly.
constexpr int kKsfmHeaderBytes = 28;
constexpr std::uint16_t kKsfmVersion = 1;

void write_ksfm(const std::string& path, const FeatureMatrix& m);
FeatureMatrix read_ksfm(const std::string& path);

}  // namespace ksr
