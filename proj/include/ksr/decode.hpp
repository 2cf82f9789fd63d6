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

#include <map>
#include <string>
#include <vector>

#include "ksr/common.hpp"

namespace ksr {

// Anything that can score the next token given a prefix.  The returned vector
// holds natural-log probabilities of length vocab_size() whose exponentials
// sum to 1 within 1e-6 (the decoders verify this and raise
// Error(source_failure) otherwise); it must be deterministic per prefix.
class PosteriorSource {
 public:
  virtual ~PosteriorSource() = default;
  virtual int vocab_size() const = 0;
  virtual int max_len() const = 0;  // cap on generated tokens (past sos)
  virtual std::vector<double> log_probs(const std::vector<int>& prefix) const = 0;
};

struct Hypothesis {
  std::vector<int> tokens;  // always starts with sos
  double log_prob{0.0};     // natural-log, accumulated per emitted token
  bool finished{false};     // eos emitted
};

// Follows the argmax at every step (ties to the lowest token id) until eos or
// the source's max_len.
Hypothesis greedy_decode(const PosteriorSource& src);

// Standard beam search: every live hypothesis expands by all tokens, the best
// k survive, and hypotheses that emit eos retire to a finished pool.  The
// search ends at max_len, or early once the pool holds k hypotheses AND the
// best live hypothesis — extended optimistically by zero additional cost —
// can no longer beat the pool's worst member.  Returns up to k hypotheses
// (finished and, if the cap cut them off, live) sorted by score descending,
// ties by lexicographic token order; with length_norm the ranking score is
// log_prob divided by the number of generated tokens.
std::vector<Hypothesis> beam_decode(const PosteriorSource& src, int k,
                                    bool length_norm = false);

// Re-derives a hypothesis' log_prob by querying the source step by step;
// test harness for score bookkeeping.
double rescore(const PosteriorSource& src, const std::vector<int>& tokens);

// Table-driven deterministic source.  Keys are token prefixes (including
// sos); a key shorter than the query is matched when `order` > 0 by keeping
// only the last `order` tokens of the prefix.  Missing entries fall back to
// the uniform distribution.
class MockModel : public PosteriorSource {
 public:
  static MockModel from_table(int vocab_size, int max_len,
                              const std::map<std::vector<int>, std::vector<double>>& entries,
                              int order = 0);
  // Line format: "id id ... -> p_0 p_1 ... p_{V-1}"; '#' starts a comment.
  // Vocab size is inferred from the first record.
  static MockModel from_file(const std::string& path, int max_len, int order = 0);
  static MockModel uniform(int vocab_size, int max_len);

  int vocab_size() const override { return vocab_size_; }
  int max_len() const override { return max_len_; }
  std::vector<double> log_probs(const std::vector<int>& prefix) const override;

 private:
  int vocab_size_{0};
  int max_len_{0};
  int order_{0};
  std::map<std::vector<int>, std::vector<double>> table_;  // normalized probs
};

}  // namespace ksr
