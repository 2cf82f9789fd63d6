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

#include "ksr/schedules.hpp"

#include <algorithm>

#include "ksr/common.hpp"

namespace ksr {

double teacher_forcing_ratio(int epoch) {
  if (epoch < 0) raise(Errc::bad_argument, "epoch must be non-negative");
  return std::max(1.0 - 0.02 * epoch, 0.8);
}

std::vector<double> smooth_labels(int true_id, const LabelSmoothingSpec& spec) {
  if (spec.vocab_size < 1) raise(Errc::bad_argument, "vocab size must be positive");
  if (spec.epsilon < 0.0 || spec.epsilon >= 1.0)
    raise(Errc::bad_argument, "epsilon must lie in [0, 1)");
  if (true_id < 0 || true_id >= spec.vocab_size)
    raise(Errc::id_out_of_range,
          "label " + std::to_string(true_id) + " outside vocabulary of " +
              std::to_string(spec.vocab_size));
  std::vector<double> dist(static_cast<size_t>(spec.vocab_size),
                           spec.epsilon / spec.vocab_size);
  dist[static_cast<size_t>(true_id)] += 1.0 - spec.epsilon;
  return dist;
}

double lr_on_step(const LrScheduleState& state, long long step) {
  if (step < 0) raise(Errc::bad_argument, "step must be non-negative");
  if (state.warmup_steps > 0 && step <= state.warmup_steps)
    return state.peak_lr * static_cast<double>(step) / state.warmup_steps;
  return state.current_lr;
}

LrScheduleState lr_on_epoch_end(LrScheduleState state, double val_loss) {
  if (val_loss < state.best_val_loss - state.threshold) {
    state.best_val_loss = val_loss;
    state.bad_epochs = 0;
  } else {
    ++state.bad_epochs;
    if (state.bad_epochs > state.patience_epochs) {
      state.current_lr *= state.reduce_factor;
      state.bad_epochs = 0;
    }
  }
  return state;
}

}  // namespace ksr
