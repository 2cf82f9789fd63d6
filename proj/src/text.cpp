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

#include "ksr/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>

#include "ksr/common.hpp"

namespace ksr {

// ---------------------------------------------------------------------------
// UTF-8 <-> UTF-32

std::u32string decode_utf8(const std::string& s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      raise(Errc::invalid_sequence, "bad UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > s.size())
      raise(Errc::invalid_sequence, "truncated UTF-8 sequence at offset " + std::to_string(i));
    for (size_t k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80)
        raise(Errc::invalid_sequence,
              "bad UTF-8 continuation byte at offset " + std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings and surrogate range; they never appear in
    // well-formed manifests and passing them through would break round-trips.
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMinByLen[len])
      raise(Errc::invalid_sequence, "overlong UTF-8 at offset " + std::to_string(i));
    if (cp >= 0xD800 && cp <= 0xDFFF)
      raise(Errc::invalid_sequence, "surrogate code point at offset " + std::to_string(i));
    if (cp > 0x10FFFF)
      raise(Errc::invalid_sequence, "code point out of range at offset " + std::to_string(i));
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(const std::u32string& s) {
  std::string out;
  out.reserve(s.size() * 3);
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transcript cleanup
//
// All structural characters of the transcript conventions are ASCII, so the
// passes below scan bytes and report byte offsets; multi-byte sequences flow
// through untouched.

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_noise_letter(char c) {
  return c == 'b' || c == 'l' || c == 'o' || c == 'n' || c == 'u';
}

// Parses "(A)/(B)" starting at the '(' at `i`; returns the end position (one
// past the final ')') and the chosen half.
size_t take_dual(const std::string& s, size_t i, TranscriptionChoice choice,
                 std::string* out) {
  const size_t a_begin = i + 1;
  size_t a_end = a_begin;
  while (a_end < s.size() && s[a_end] != ')' && s[a_end] != '(') ++a_end;
  if (a_end >= s.size() || s[a_end] == '(')
    raise(Errc::unbalanced_parens,
          "unterminated '(' at byte " + std::to_string(i));
  if (a_end + 1 >= s.size() || s[a_end + 1] != '/')
    raise(Errc::unbalanced_parens,
          "expected '/' after ')' at byte " + std::to_string(a_end + 1));
  if (a_end + 2 >= s.size() || s[a_end + 2] != '(')
    raise(Errc::unbalanced_parens,
          "expected '(' after '/' at byte " + std::to_string(a_end + 2));
  const size_t b_begin = a_end + 3;
  size_t b_end = b_begin;
  while (b_end < s.size() && s[b_end] != ')' && s[b_end] != '(') ++b_end;
  if (b_end >= s.size() || s[b_end] == '(')
    raise(Errc::unbalanced_parens,
          "unterminated '(' at byte " + std::to_string(a_end + 2));
  if (choice == TranscriptionChoice::spelling)
    out->append(s, a_begin, a_end - a_begin);
  else
    out->append(s, b_begin, b_end - b_begin);
  return b_end + 1;
}

}  // namespace

std::string clean_transcript(const std::string& raw, const CleanupRules& rules) {
  // Pass 1: resolve dual transcriptions; any paren outside the documented
  // "(A)/(B)" shape is an error.
  std::string chosen;
  chosen.reserve(raw.size());
  for (size_t i = 0; i < raw.size();) {
    const char c = raw[i];
    if (c == '(') {
      i = take_dual(raw, i, rules.transcription_choice, &chosen);
    } else if (c == ')') {
      raise(Errc::unbalanced_parens, "stray ')' at byte " + std::to_string(i));
    } else {
      chosen.push_back(c);
      ++i;
    }
  }

  // Pass 2: noise markers — a marker letter at a word boundary followed by '/'.
  std::string unmarked;
  if (rules.strip_noise_markers) {
    unmarked.reserve(chosen.size());
    for (size_t i = 0; i < chosen.size();) {
      const bool at_boundary = unmarked.empty() || is_ascii_space(unmarked.back());
      if (at_boundary && is_noise_letter(chosen[i]) && i + 1 < chosen.size() &&
          chosen[i + 1] == '/') {
        i += 2;
        continue;
      }
      unmarked.push_back(chosen[i]);
      ++i;
    }
  } else {
    unmarked = std::move(chosen);
  }

  // Pass 3: special characters.
  std::string plain;
  if (rules.strip_special_chars) {
    plain.reserve(unmarked.size());
    for (char c : unmarked)
      if (c != '+' && c != '*' && c != '/') plain.push_back(c);
  } else {
    plain = std::move(unmarked);
  }

  // Pass 4: whitespace.
  if (!rules.collapse_whitespace) return plain;
  std::string out;
  out.reserve(plain.size());
  bool pending_space = false;
  for (char c : plain) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hangul jamo
//
// Syllables decompose by pure arithmetic on the precomposed block:
//   code = cp - 0xAC00; initial = code / 588; medial = (code % 588) / 28;
//   final = code % 28 (0 = none).
// Output uses the compatibility jamo block (U+3131..U+3163) — the form fonts
// and terminals render standalone.

namespace {

constexpr char32_t kSyllableBase = 0xAC00;
constexpr char32_t kSyllableEnd = 0xD7A3;
constexpr int kMedialCount = 21;
constexpr int kFinalCount = 28;  // including "no final"

constexpr std::array<char32_t, 19> kInitials = {
    0x3131, 0x3132, 0x3134, 0x3137, 0x3138, 0x3139, 0x3141, 0x3142, 0x3143,
    0x3145, 0x3146, 0x3147, 0x3148, 0x3149, 0x314A, 0x314B, 0x314C, 0x314D,
    0x314E};

// U+314F..U+3163 are contiguous, but an explicit table keeps the three
// inventories symmetric and greppable.
constexpr std::array<char32_t, 21> kMedials = {
    0x314F, 0x3150, 0x3151, 0x3152, 0x3153, 0x3154, 0x3155, 0x3156, 0x3157,
    0x3158, 0x3159, 0x315A, 0x315B, 0x315C, 0x315D, 0x315E, 0x315F, 0x3160,
    0x3161, 0x3162, 0x3163};

// Index 0 of the final slot means "no final"; this table starts at index 1.
constexpr std::array<char32_t, 27> kFinals = {
    0x3131, 0x3132, 0x3133, 0x3134, 0x3135, 0x3136, 0x3137, 0x3139, 0x313A,
    0x313B, 0x313C, 0x313D, 0x313E, 0x313F, 0x3140, 0x3141, 0x3142, 0x3144,
    0x3145, 0x3146, 0x3147, 0x3148, 0x314A, 0x314B, 0x314C, 0x314D, 0x314E};

int initial_index(char32_t c) {
  for (size_t i = 0; i < kInitials.size(); ++i)
    if (kInitials[i] == c) return static_cast<int>(i);
  return -1;
}

int medial_index(char32_t c) {
  if (c >= 0x314F && c <= 0x3163) return static_cast<int>(c - 0x314F);
  return -1;
}

int final_index(char32_t c) {  // 1-based to match the syllable arithmetic
  for (size_t i = 0; i < kFinals.size(); ++i)
    if (kFinals[i] == c) return static_cast<int>(i) + 1;
  return -1;
}

bool is_compat_jamo(char32_t c) { return c >= 0x3131 && c <= 0x3163; }

}  // namespace

std::u32string decompose_jamo(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size() * 2);
  for (char32_t cp : s) {
    if (cp >= kSyllableBase && cp <= kSyllableEnd) {
      const int code = static_cast<int>(cp - kSyllableBase);
      const int ini = code / (kMedialCount * kFinalCount);
      const int med = (code % (kMedialCount * kFinalCount)) / kFinalCount;
      const int fin = code % kFinalCount;
      out.push_back(kInitials[static_cast<size_t>(ini)]);
      out.push_back(kMedials[static_cast<size_t>(med)]);
      if (fin > 0) out.push_back(kFinals[static_cast<size_t>(fin - 1)]);
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

std::string decompose_jamo_utf8(const std::string& s) {
  return encode_utf8(decompose_jamo(decode_utf8(s)));
}

std::u32string compose_jamo(const std::u32string& jamos) {
  std::u32string out;
  out.reserve(jamos.size());
  size_t i = 0;
  while (i < jamos.size()) {
    const char32_t c = jamos[i];
    const int ini = initial_index(c);
    if (ini >= 0 && i + 1 < jamos.size() && medial_index(jamos[i + 1]) >= 0) {
      const int med = medial_index(jamos[i + 1]);
      i += 2;
      int fin = 0;
      if (i < jamos.size()) {
        const int f = final_index(jamos[i]);
        // A consonant here is the final of this syllable unless a medial
        // follows it — then it starts the next syllable.
        const bool starts_next = initial_index(jamos[i]) >= 0 &&
                                 i + 1 < jamos.size() &&
                                 medial_index(jamos[i + 1]) >= 0;
        if (f > 0 && !starts_next) {
          fin = f;
          ++i;
        }
      }
      out.push_back(kSyllableBase +
                    static_cast<char32_t>((ini * kMedialCount + med) * kFinalCount + fin));
    } else if (is_compat_jamo(c)) {
      raise(Errc::invalid_sequence,
            "jamo at position " + std::to_string(i) +
                " does not start a valid (initial, medial[, final]) group");
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

std::string compose_jamo_utf8(const std::string& jamos) {
  return encode_utf8(compose_jamo(decode_utf8(jamos)));
}

std::u32string normalize_hangul_nfc(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const char32_t c = s[i];
    // L + V (+ T) from the conjoining jamo block.
    if (c >= 0x1100 && c <= 0x1112 && i + 1 < s.size() && s[i + 1] >= 0x1161 &&
        s[i + 1] <= 0x1175) {
      char32_t syll = kSyllableBase +
                      ((c - 0x1100) * kMedialCount + (s[i + 1] - 0x1161)) * kFinalCount;
      i += 2;
      if (i < s.size() && s[i] >= 0x11A8 && s[i] <= 0x11C2) {
        syll += s[i] - 0x11A7;
        ++i;
      }
      out.push_back(syll);
      continue;
    }
    // Precomposed LV + trailing conjoining T.
    if (c >= kSyllableBase && c <= kSyllableEnd && (c - kSyllableBase) % kFinalCount == 0 &&
        i + 1 < s.size() && s[i + 1] >= 0x11A8 && s[i + 1] <= 0x11C2) {
      out.push_back(c + (s[i + 1] - 0x11A7));
      i += 2;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string normalize_hangul_nfc_utf8(const std::string& s) {
  return encode_utf8(normalize_hangul_nfc(decode_utf8(s)));
}

// ---------------------------------------------------------------------------
// Vocabulary

std::vector<int> Vocabulary::encode(const std::string& text) const {
  std::u32string units = decode_utf8(text);
  if (unit_ == TextUnit::jamo) units = decompose_jamo(units);
  std::vector<int> ids;
  ids.reserve(units.size());
  for (char32_t c : units) ids.push_back(id_of(c));
  return ids;
}

std::string Vocabulary::decode(const std::vector<int>& ids) const {
  std::u32string units;
  units.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= size())
      raise(Errc::id_out_of_range, "token id " + std::to_string(id));
    if (id == kPadId || id == kSosId || id == kEosId) continue;
    if (id == kUnkId) {
      units.push_back(0xFFFD);
      continue;
    }
    units += id_to_token_[static_cast<size_t>(id)];
  }
  if (unit_ == TextUnit::jamo) units = compose_jamo(units);
  return encode_utf8(units);
}

int Vocabulary::id_of(char32_t token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

std::string Vocabulary::token_of(int id) const {
  if (id < 0 || id >= size())
    raise(Errc::id_out_of_range, "token id " + std::to_string(id));
  return encode_utf8(id_to_token_[static_cast<size_t>(id)]);
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::missing_file, "cannot open " + path + " for writing");
  for (int id = 0; id < size(); ++id) f << token_of(id) << '\n';
}

Vocabulary Vocabulary::load(const std::string& path, TextUnit unit) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::missing_file, "cannot open " + path);
  Vocabulary v;
  v.unit_ = unit;
  std::string line;
  int id = 0;
  const char* expected[] = {kPadToken, kSosToken, kEosToken, kUnkToken};
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (id < kNumSpecialIds) {
      if (line != expected[id])
        raise(Errc::malformed_header,
              "vocabulary line " + std::to_string(id) + " must be " + expected[id]);
      v.id_to_token_.push_back(decode_utf8(line));
    } else {
      const std::u32string tok = decode_utf8(line);
      if (tok.size() != 1)
        raise(Errc::invalid_sequence,
              "vocabulary line " + std::to_string(id) + " is not a single token");
      if (!v.token_to_id_.emplace(tok[0], id).second)
        raise(Errc::invalid_sequence,
              "duplicate token on line " + std::to_string(id));
      v.id_to_token_.push_back(tok);
    }
    ++id;
  }
  if (id < kNumSpecialIds) raise(Errc::malformed_header, "vocabulary too short");
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus, TextUnit unit) {
  if (corpus.empty()) raise(Errc::empty_corpus, "cannot build a vocabulary from nothing");
  std::map<char32_t, long long> freq;  // ordered: ties broken by code point
  for (const std::string& line : corpus) {
    std::u32string units = decode_utf8(line);
    if (unit == TextUnit::jamo) units = decompose_jamo(units);
    for (char32_t c : units) ++freq[c];
  }
  std::vector<std::pair<char32_t, long long>> items(freq.begin(), freq.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary v;
  v.unit_ = unit;
  for (const char* s : {kPadToken, kSosToken, kEosToken, kUnkToken})
    v.id_to_token_.push_back(decode_utf8(s));
  for (const auto& [token, count] : items) {
    (void)count;
    v.token_to_id_.emplace(token, static_cast<int>(v.id_to_token_.size()));
    v.id_to_token_.push_back(std::u32string(1, token));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Corpus length statistics

namespace {

double median_of(const std::vector<long long>& v, size_t lo, size_t hi) {
  const size_t n = hi - lo;
  const size_t mid = lo + n / 2;
  if (n % 2 == 1) return static_cast<double>(v[mid]);
  return (static_cast<double>(v[mid - 1]) + static_cast<double>(v[mid])) / 2.0;
}

}  // namespace

LengthStats corpus_length_stats(std::vector<long long> lengths) {
  if (lengths.empty()) raise(Errc::empty_input, "no lengths");
  std::sort(lengths.begin(), lengths.end());
  const size_t n = lengths.size();

  LengthStats st;
  st.count = static_cast<long long>(n);
  st.min = lengths.front();
  st.max = lengths.back();
  st.median = median_of(lengths, 0, n);
  // Median-of-halves: an odd count drops the central element from both halves.
  const size_t lower_hi = n / 2;
  const size_t upper_lo = (n % 2 == 0) ? n / 2 : n / 2 + 1;
  st.q1 = n == 1 ? static_cast<double>(lengths[0]) : median_of(lengths, 0, lower_hi);
  st.q3 = n == 1 ? static_cast<double>(lengths[0]) : median_of(lengths, upper_lo, n);
  st.iqr_outlier_threshold = st.q3 + 1.5 * (st.q3 - st.q1);
  return st;
}

}  // namespace ksr
