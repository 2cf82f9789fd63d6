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
#include <string>
#include <unordered_map>
#include <vector>

namespace ksr {

// ---------------------------------------------------------------------------
// UTF-8 <-> UTF-32

std::u32string decode_utf8(const std::string& s);
std::string encode_utf8(const std::u32string& s);

// ---------------------------------------------------------------------------
// Transcript cleanup

enum class TranscriptionChoice { spelling, phonetic };

struct CleanupRules {
  TranscriptionChoice transcription_choice{TranscriptionChoice::spelling};
  bool strip_noise_markers{true};
  bool strip_special_chars{true};
  bool collapse_whitespace{true};
};

// Normalizes one raw transcript line:
//   * dual transcriptions "(A)/(B)" keep A (spelling) or B (phonetic);
//   * noise markers "b/ l/ o/ n/ u/" at a word boundary are dropped;
//   * the special characters '+', '*' and any leftover '/' are dropped;
//   * whitespace runs collapse to a single space, ends trimmed.
// Malformed parenthesis structure raises Error(unbalanced_parens) carrying the
// offending byte offset in the message.  Idempotent: cleaning clean text is a
// no-op.
std::string clean_transcript(const std::string& raw, const CleanupRules& rules);

// ---------------------------------------------------------------------------
// Hangul jamo

// Splits every precomposed syllable (U+AC00..U+D7A3) into 2-3 compatibility
// jamo (initial, medial, optional final); everything else passes through.
std::u32string decompose_jamo(const std::u32string& s);
std::string decompose_jamo_utf8(const std::string& s);

// Exact inverse of decompose_jamo on its image: groups compatibility jamo back
// into syllables with one-character lookahead (a consonant directly before a
// medial vowel starts the next syllable).  A jamo that cannot join any valid
// (initial, medial[, final]) group raises Error(invalid_sequence).
std::u32string compose_jamo(const std::u32string& jamos);
std::string compose_jamo_utf8(const std::string& jamos);

// Algorithmic Hangul NFC: conjoining jamo (U+1100 block) L+V and LV+T pairs
// are composed into precomposed syllables.  Other decomposable scripts are
// left untouched; see the README for the deliberate scope limit.
std::u32string normalize_hangul_nfc(const std::u32string& s);
std::string normalize_hangul_nfc_utf8(const std::string& s);

// ---------------------------------------------------------------------------
// Vocabulary

enum class TextUnit { character, jamo };

constexpr const char* kPadToken = "<pad>";
constexpr const char* kSosToken = "<sos>";
constexpr const char* kEosToken = "<eos>";
constexpr const char* kUnkToken = "<unk>";

// Token inventory over single characters or single jamo.  Ids 0-3 are the
// fixed specials (pad, sos, eos, unk); content tokens follow in descending
// corpus frequency, ties broken by code point, so a corpus always produces
// the same table.
class Vocabulary {
 public:
  TextUnit unit() const { return unit_; }
  int size() const { return static_cast<int>(id_to_token_.size()); }

  // Unit-aware: jamo vocabularies decompose the text first.  Unknown
  // characters map to unk.
  std::vector<int> encode(const std::string& text) const;

  // Inverse of encode on in-vocabulary text: jamo vocabularies re-compose
  // syllables.  Special ids are skipped; unk renders as U+FFFD.
  std::string decode(const std::vector<int>& ids) const;

  int id_of(char32_t token) const;  // kUnkId when absent
  std::string token_of(int id) const;

  // One token per line, line number = id; the first four lines are the
  // special literals.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path, TextUnit unit);

  static Vocabulary build(const std::vector<std::string>& corpus, TextUnit unit);

 private:
  TextUnit unit_{TextUnit::character};
  std::unordered_map<char32_t, int> token_to_id_;
  std::vector<std::u32string> id_to_token_;  // specials stored as multi-char
};

// ---------------------------------------------------------------------------
// Corpus length statistics

struct LengthStats {
  long long count{0};
  long long min{0};
  long long max{0};
  double q1{0.0};
  double median{0.0};
  double q3{0.0};
  double iqr_outlier_threshold{0.0};  // q3 + 1.5 * (q3 - q1)
};

// Quartiles by the median-of-halves convention (median excluded from both
// halves when the count is odd) — the boxplot flavor, so the outlier
// threshold matches whisker plots of the corpus.
LengthStats corpus_length_stats(std::vector<long long> lengths);

}  // namespace ksr
