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

#include <stdexcept>
#include <string>

namespace ksr {

// Reserved token ids shared by the vocabulary and the decoders.
constexpr int kPadId = 0;
constexpr int kSosId = 1;
constexpr int kEosId = 2;
constexpr int kUnkId = 3;
constexpr int kNumSpecialIds = 4;

enum class Errc {
  missing_file,
  malformed_header,
  unsupported_format,
  missing_rate,
  empty_input,
  all_silent,
  too_short,
  degenerate_length,
  not_power_of_two,
  negative_frequency,
  negative_mel,
  ragged_input,
  wrong_kind,
  bad_band,
  too_many_filters,
  too_many_ceps,
  dimension_mismatch,
  mask_out_of_range,
  unbalanced_parens,
  invalid_sequence,
  empty_corpus,
  shape_mismatch,
  bad_alignment,
  indivisible_heads,
  input_too_small,
  source_failure,
  zero_beam,
  negative_probability,
  id_out_of_range,
  empty_reference,
  bad_argument,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace ksr
