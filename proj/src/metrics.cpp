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

#include "ksr/metrics.hpp"

#include "ksr/common.hpp"

namespace ksr {

namespace {

std::u32string to_units(const std::string& text, TextUnit unit, bool ignore_spaces) {
  std::u32string s = normalize_hangul_nfc(decode_utf8(text));
  if (unit == TextUnit::jamo) s = decompose_jamo(s);
  if (ignore_spaces) {
    std::u32string kept;
    kept.reserve(s.size());
    for (char32_t c : s)
      if (c != U' ') kept.push_back(c);
    s = std::move(kept);
  }
  return s;
}

}  // namespace

CerResult cer(const std::string& hyp, const std::string& ref, TextUnit unit,
              bool ignore_spaces) {
  const std::u32string h = to_units(hyp, unit, ignore_spaces);
  const std::u32string r = to_units(ref, unit, ignore_spaces);
  if (r.empty()) raise(Errc::empty_reference, "reference is empty after tokenization");
  CerResult out;
  out.distance = levenshtein(h, r);
  out.ref_len = static_cast<long long>(r.size());
  out.cer_percent = 100.0 * static_cast<double>(out.distance) / static_cast<double>(out.ref_len);
  return out;
}

CerResult corpus_cer(const std::vector<std::pair<std::string, std::string>>& pairs,
                     TextUnit unit, bool ignore_spaces) {
  if (pairs.empty()) raise(Errc::empty_corpus, "no utterance pairs to score");
  CerResult total;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const std::u32string h = to_units(pairs[i].first, unit, ignore_spaces);
    const std::u32string r = to_units(pairs[i].second, unit, ignore_spaces);
    if (r.empty())
      raise(Errc::empty_reference,
            "reference of utterance " + std::to_string(i) + " is empty");
    total.distance += levenshtein(h, r);
    total.ref_len += static_cast<long long>(r.size());
  }
  total.cer_percent =
      100.0 * static_cast<double>(total.distance) / static_cast<double>(total.ref_len);
  return total;
}

}  // namespace ksr
