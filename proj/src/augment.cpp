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

#include "ksr/augment.hpp"

#include <algorithm>
#include <cmath>

#include "ksr/common.hpp"

namespace ksr {

MaskSpec sample_freq_mask(int v, int freq_mask_param, SplitMix64& rng) {
  if (v < 1) raise(Errc::bad_argument, "need at least one frequency channel");
  if (freq_mask_param < 0) raise(Errc::bad_argument, "negative mask parameter");
  const int cap = std::min(freq_mask_param, v);
  const int width = static_cast<int>(rng.below(static_cast<std::uint64_t>(cap)));
  const int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>(v - width)));
  return MaskSpec{MaskAxis::frequency, offset, width};
}

MaskSpec sample_time_mask(int tau, int time_mask_param, double max_ratio,
                          SplitMix64& rng) {
  if (tau < 1) raise(Errc::bad_argument, "need at least one frame");
  if (time_mask_param < 0) raise(Errc::bad_argument, "negative mask parameter");
  if (max_ratio < 0.0 || max_ratio > 1.0)
    raise(Errc::bad_argument, "max time-mask ratio must lie in [0, 1]");
  const int ratio_cap = static_cast<int>(std::floor(max_ratio * tau));
  const int cap = std::min(time_mask_param, ratio_cap);
  const int width = static_cast<int>(rng.below(static_cast<std::uint64_t>(cap)));
  const int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>(tau - width)));
  return MaskSpec{MaskAxis::time, offset, width};
}

FeatureMatrix apply_masks(const FeatureMatrix& m,
                          const std::vector<MaskSpec>& masks,
                          double mask_value) {
  for (const MaskSpec& mask : masks) {
    const int axis_len = mask.axis == MaskAxis::frequency ? m.dim() : m.frames();
    if (mask.offset < 0 || mask.width < 0 || mask.offset + mask.width > axis_len)
      raise(Errc::mask_out_of_range,
            "mask [" + std::to_string(mask.offset) + ", " +
                std::to_string(mask.offset + mask.width) + ") exceeds axis length " +
                std::to_string(axis_len));
  }

  FeatureMatrix out = m;
  for (const MaskSpec& mask : masks) {
    if (mask.axis == MaskAxis::frequency) {
      for (int t = 0; t < out.frames(); ++t) {
        double* row = out.data.row(t);
        std::fill(row + mask.offset, row + mask.offset + mask.width, mask_value);
      }
    } else {
      for (int t = mask.offset; t < mask.offset + mask.width; ++t) {
        double* row = out.data.row(t);
        std::fill(row, row + out.dim(), mask_value);
      }
    }
  }
  return out;
}

std::pair<FeatureMatrix, std::vector<MaskSpec>> augment(
    const FeatureMatrix& m, const AugmentPolicy& policy) {
  if (policy.n_freq_masks < 0 || policy.n_time_masks < 0)
    raise(Errc::bad_argument, "mask counts must be non-negative");
  if (policy.max_time_mask_ratio < 0.0 || policy.max_time_mask_ratio > 1.0)
    raise(Errc::bad_argument, "max time-mask ratio must lie in [0, 1]");
  if (policy.freq_mask_param < 0 || policy.time_mask_param < 0)
    raise(Errc::bad_argument, "mask parameters must be non-negative");

  SplitMix64 rng(policy.seed);
  std::vector<MaskSpec> masks;
  masks.reserve(static_cast<size_t>(policy.n_freq_masks + policy.n_time_masks));
  for (int i = 0; i < policy.n_freq_masks; ++i)
    masks.push_back(sample_freq_mask(m.dim(), policy.freq_mask_param, rng));
  for (int i = 0; i < policy.n_time_masks; ++i)
    masks.push_back(sample_time_mask(m.frames(), policy.time_mask_param,
                                     policy.max_time_mask_ratio, rng));
  return {apply_masks(m, masks, policy.mask_value), std::move(masks)};
}

}  // namespace ksr
