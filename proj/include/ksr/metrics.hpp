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

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ksr/text.hpp"

namespace ksr {

// Unit-cost edit distance (insert/delete/substitute) with two-row memory.
template <typename Seq>
long long levenshtein(const Seq& x, const Seq& y) {
  const Seq& a = x.size() <= y.size() ? x : y;  // keep the rows short
  const Seq& b = x.size() <= y.size() ? y : x;
  const size_t n = a.size();
  std::vector<long long> prev(n + 1), cur(n + 1);
  for (size_t j = 0; j <= n; ++j) prev[j] = static_cast<long long>(j);
  for (size_t i = 1; i <= b.size(); ++i) {
    cur[0] = static_cast<long long>(i);
    for (size_t j = 1; j <= n; ++j) {
      const long long sub = prev[j - 1] + (a[j - 1] == b[i - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

struct CerResult {
  long long distance{0};
  long long ref_len{0};
  double cer_percent{0.0};  // 100 * distance / ref_len; may exceed 100
};

// Tokenizes both strings at the chosen unit (jamo decomposes syllables
// first), Hangul-NFC-normalizes, optionally drops spaces, and scores
// 100 * levenshtein / |ref|.  An empty reference (after tokenization) raises
// Error(empty_reference).
CerResult cer(const std::string& hyp, const std::string& ref, TextUnit unit,
              bool ignore_spaces = false);

// Pooled corpus score: sums distances and reference lengths across pairs
// (hyp, ref) before dividing, so long utterances weigh proportionally.
CerResult corpus_cer(const std::vector<std::pair<std::string, std::string>>& pairs,
                     TextUnit unit, bool ignore_spaces = false);

}  // namespace ksr
