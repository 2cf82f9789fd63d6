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
#include <utility>
#include <vector>

#include "ksr/features.hpp"
#include "ksr/rng.hpp"

namespace ksr {

enum class MaskAxis { frequency, time };

// One rectangular mask: a band of `width` consecutive indices starting at
// `offset` along the given axis.  The half-open range [offset, offset+width)
// must fit inside the axis.
struct MaskSpec {
  MaskAxis axis{MaskAxis::frequency};
  int offset{0};
  int width{0};
};

// SpecAugment policy.  F and T cap the mask widths; p_s additionally caps a
// time mask at floor(p_s * n_frames) so short utterances are never wiped out.
struct AugmentPolicy {
  int freq_mask_param{20};        // F: max width of one frequency mask
  int n_freq_masks{1};
  int time_mask_param{100};       // T: max width of one time mask
  int n_time_masks{10};
  double max_time_mask_ratio{0.05};  // p_s
  double mask_value{0.0};
  std::uint64_t seed{0};
};

// Draws width f ~ U{0..min(F, v)} and offset f0 ~ U{0..v-f}.  The masked band
// [f0, f0+f) always lies inside [0, v).
MaskSpec sample_freq_mask(int v, int freq_mask_param, SplitMix64& rng);

// Draws width t ~ U{0..min(T, floor(p_s * tau))} and offset t0 ~ U{0..tau-t}.
MaskSpec sample_time_mask(int tau, int time_mask_param, double max_ratio,
                          SplitMix64& rng);

// Returns a copy of `m` with each mask's cells set to mask_value; frequency
// masks blank columns across all frames, time masks blank whole rows.  Cells
// outside every mask are bit-identical to the input.
FeatureMatrix apply_masks(const FeatureMatrix& m,
                          const std::vector<MaskSpec>& masks,
                          double mask_value);

// Samples n_freq_masks frequency masks followed by n_time_masks time masks
// (in that order, so a seed pins down the entire draw sequence) from a
// generator seeded with policy.seed, applies them, and returns the masked
// copy together with the masks for auditing.  The input is never mutated.
std::pair<FeatureMatrix, std::vector<MaskSpec>> augment(
    const FeatureMatrix& m, const AugmentPolicy& policy);

}  // namespace ksr
