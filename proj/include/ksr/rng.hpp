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

#include <cstdint>

namespace ksr {

// SplitMix64 generator (Steele, Lea & Flood, "Fast splittable pseudorandom
// number generators", OOPSLA 2014).  Chosen over std::mt19937 because the
// entire state is one u64, the output for a given seed is identical on every
// platform / standard library, and independent streams can be derived cheaply
// for per-utterance parallel work.  Not cryptographic.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw from {0, 1, ..., bound_inclusive}.  Plain modulo: with a
  // 64-bit output and the small bounds used here (mask widths, frame counts)
  // the bias is below 2^-40 and irrelevant next to the value of having a
  // one-line, exactly reproducible mapping.
  std::uint64_t below(std::uint64_t bound_inclusive) {
    return next() % (bound_inclusive + 1);
  }

  // Forks an independent generator; the parent advances by one step.
  SplitMix64 split() { return SplitMix64(next()); }

  // Deterministic per-stream seed derivation, so utterance i of a batch can
  // be processed on any thread (or re-run alone) and see the same draws.
  static SplitMix64 derive(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(SplitMix64(seed ^ (stream + 1) * 0x5851f42d4c957f2dULL).next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace ksr
