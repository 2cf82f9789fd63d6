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

#include <limits>
#include <vector>

namespace ksr {

// max(1 - 0.02 * epoch, 0.8): full teacher forcing at epoch 0, decaying two
// points per epoch to a floor of 0.8.
double teacher_forcing_ratio(int epoch);

struct LabelSmoothingSpec {
  double epsilon{0.1};
  int vocab_size{0};
};

// (1 - eps) * onehot(true_id) + eps / V in every slot; sums to 1 within 1e-12.
std::vector<double> smooth_labels(int true_id, const LabelSmoothingSpec& spec);

// Linear warmup to peak_lr over warmup_steps, then reduce-on-plateau: an
// epoch "improves" only when val_loss < best - threshold; once more than
// patience_epochs consecutive epochs fail to improve, the rate is multiplied
// by reduce_factor and the counter resets.
struct LrScheduleState {
  int warmup_steps{400};
  double peak_lr{3e-4};
  double reduce_factor{0.5};
  int patience_epochs{1};
  double threshold{1e-4};
  double best_val_loss{std::numeric_limits<double>::infinity()};
  double current_lr{3e-4};
  int bad_epochs{0};
};

// Warmup is a pure function of the step; past warmup the plateau-controlled
// current_lr applies.
double lr_on_step(const LrScheduleState& state, long long step);

// Functional update: feeds one epoch's validation loss through the plateau
// machine and returns the successor state.
LrScheduleState lr_on_epoch_end(LrScheduleState state, double val_loss);

}  // namespace ksr
