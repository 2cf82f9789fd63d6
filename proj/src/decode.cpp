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

#include "ksr/decode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ksr {

namespace {

std::vector<double> checked_log_probs(const PosteriorSource& src,
                                      const std::vector<int>& prefix) {
  std::vector<double> lp = src.log_probs(prefix);
  if (static_cast<int>(lp.size()) != src.vocab_size())
    raise(Errc::source_failure, "posterior vector has the wrong length");
  double sum = 0.0;
  for (double v : lp) sum += std::exp(v);
  if (std::abs(sum - 1.0) > 1e-6)
    raise(Errc::source_failure,
          "posterior mass sums to " + std::to_string(sum) + ", not 1");
  return lp;
}

// Ranking score: total log-probability, or per-token when normalizing.
double score_of(const Hypothesis& h, bool length_norm) {
  if (!length_norm) return h.log_prob;
  const size_t generated = h.tokens.size() - 1;
  return generated == 0 ? h.log_prob : h.log_prob / static_cast<double>(generated);
}

// The best score a live hypothesis could still reach: future steps add at
// most 0 to log_prob, and under length normalization a non-positive total
// only improves as the length grows toward max_len.
double optimistic_bound(const Hypothesis& h, bool length_norm, int max_len) {
  if (!length_norm) return h.log_prob;
  return h.log_prob <= 0.0 ? h.log_prob / static_cast<double>(max_len) : h.log_prob;
}

bool better(const Hypothesis& a, const Hypothesis& b, bool length_norm) {
  const double sa = score_of(a, length_norm);
  const double sb = score_of(b, length_norm);
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

}  // namespace

Hypothesis greedy_decode(const PosteriorSource& src) {
  if (src.vocab_size() < 1) raise(Errc::source_failure, "empty vocabulary");
  Hypothesis h;
  h.tokens.push_back(kSosId);
  while (!h.finished && static_cast<int>(h.tokens.size()) - 1 < src.max_len()) {
    const std::vector<double> lp = checked_log_probs(src, h.tokens);
    int best = 0;
    for (int t = 1; t < static_cast<int>(lp.size()); ++t)
      if (lp[static_cast<size_t>(t)] > lp[static_cast<size_t>(best)]) best = t;
    h.tokens.push_back(best);
    h.log_prob += lp[static_cast<size_t>(best)];
    h.finished = best == kEosId;
  }
  return h;
}

std::vector<Hypothesis> beam_decode(const PosteriorSource& src, int k,
                                    bool length_norm) {
  if (k < 1) raise(Errc::zero_beam, "beam width must be at least 1");
  if (src.vocab_size() < 1) raise(Errc::source_failure, "empty vocabulary");

  std::vector<Hypothesis> live;
  {
    Hypothesis root;
    root.tokens.push_back(kSosId);
    live.push_back(std::move(root));
  }
  std::vector<Hypothesis> finished;

  for (int step = 0; step < src.max_len() && !live.empty(); ++step) {
    if (static_cast<int>(finished.size()) >= k) {
      double worst_kept = std::numeric_limits<double>::infinity();
      {
        std::vector<double> scores;
        scores.reserve(finished.size());
        for (const Hypothesis& f : finished) scores.push_back(score_of(f, length_norm));
        std::nth_element(scores.begin(), scores.begin() + (k - 1), scores.end(),
                         std::greater<double>());
        worst_kept = scores[static_cast<size_t>(k - 1)];
      }
      double best_live = -std::numeric_limits<double>::infinity();
      for (const Hypothesis& h : live)
        best_live = std::max(best_live, optimistic_bound(h, length_norm, src.max_len()));
      if (best_live <= worst_kept) break;
    }

    std::vector<Hypothesis> candidates;
    candidates.reserve(live.size() * static_cast<size_t>(src.vocab_size()));
    for (const Hypothesis& h : live) {
      const std::vector<double> lp = checked_log_probs(src, h.tokens);
      for (int t = 0; t < src.vocab_size(); ++t) {
        Hypothesis next = h;
        next.tokens.push_back(t);
        next.log_prob += lp[static_cast<size_t>(t)];
        next.finished = t == kEosId;
        candidates.push_back(std::move(next));
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [length_norm](const Hypothesis& a, const Hypothesis& b) {
                return better(a, b, length_norm);
              });
    if (static_cast<int>(candidates.size()) > k)
      candidates.resize(static_cast<size_t>(k));

    live.clear();
    for (Hypothesis& c : candidates) {
      if (c.finished)
        finished.push_back(std::move(c));
      else
        live.push_back(std::move(c));
    }
  }

  std::vector<Hypothesis> ranked = std::move(finished);
  ranked.insert(ranked.end(), live.begin(), live.end());
  std::sort(ranked.begin(), ranked.end(),
            [length_norm](const Hypothesis& a, const Hypothesis& b) {
              return better(a, b, length_norm);
            });
  if (static_cast<int>(ranked.size()) > k) ranked.resize(static_cast<size_t>(k));
  return ranked;
}

double rescore(const PosteriorSource& src, const std::vector<int>& tokens) {
  if (tokens.empty() || tokens.front() != kSosId)
    raise(Errc::bad_argument, "token sequence must start with sos");
  double total = 0.0;
  std::vector<int> prefix;
  prefix.push_back(kSosId);
  for (size_t i = 1; i < tokens.size(); ++i) {
    const std::vector<double> lp = checked_log_probs(src, prefix);
    const int t = tokens[i];
    if (t < 0 || t >= src.vocab_size())
      raise(Errc::id_out_of_range, "token id " + std::to_string(t));
    total += lp[static_cast<size_t>(t)];
    prefix.push_back(t);
  }
  return total;
}

MockModel MockModel::from_table(
    int vocab_size, int max_len,
    const std::map<std::vector<int>, std::vector<double>>& entries, int order) {
  if (vocab_size < 1) raise(Errc::bad_argument, "vocab size must be positive");
  if (max_len < 1) raise(Errc::bad_argument, "max_len must be positive");
  if (order < 0) raise(Errc::bad_argument, "order must be non-negative");

  MockModel m;
  m.vocab_size_ = vocab_size;
  m.max_len_ = max_len;
  m.order_ = order;
  for (const auto& [key, probs] : entries) {
    if (static_cast<int>(probs.size()) != vocab_size)
      raise(Errc::bad_argument, "probability vector length differs from vocab size");
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) raise(Errc::negative_probability, "probabilities must be non-negative");
      sum += p;
    }
    if (sum <= 0.0) raise(Errc::bad_argument, "probability vector sums to zero");
    std::vector<double> norm(probs);
    for (double& p : norm) p /= sum;
    m.table_.emplace(key, std::move(norm));
  }
  return m;
}

MockModel MockModel::from_file(const std::string& path, int max_len, int order) {
  std::ifstream f(path);
  if (!f) raise(Errc::missing_file, "cannot open " + path);
  std::map<std::vector<int>, std::vector<double>> entries;
  int vocab = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const size_t arrow = line.find("->");
    if (arrow == std::string::npos)
      raise(Errc::malformed_header,
            "line " + std::to_string(line_no) + ": expected 'prefix -> probs'");
    std::istringstream left(line.substr(0, arrow));
    std::vector<int> prefix;
    int id;
    while (left >> id) prefix.push_back(id);
    std::istringstream right(line.substr(arrow + 2));
    std::vector<double> probs;
    double p;
    while (right >> p) probs.push_back(p);
    if (probs.empty())
      raise(Errc::malformed_header,
            "line " + std::to_string(line_no) + ": no probabilities");
    if (vocab == 0) vocab = static_cast<int>(probs.size());
    if (static_cast<int>(probs.size()) != vocab)
      raise(Errc::malformed_header,
            "line " + std::to_string(line_no) + ": inconsistent vector length");
    entries.emplace(std::move(prefix), std::move(probs));
  }
  if (entries.empty()) raise(Errc::empty_input, "mock model file has no records");
  return from_table(vocab, max_len, entries, order);
}

MockModel MockModel::uniform(int vocab_size, int max_len) {
  return from_table(vocab_size, max_len, {}, 0);
}

std::vector<double> MockModel::log_probs(const std::vector<int>& prefix) const {
  std::vector<int> key = prefix;
  if (order_ > 0 && static_cast<int>(key.size()) > order_)
    key.erase(key.begin(), key.end() - order_);
  auto it = table_.find(key);
  std::vector<double> out(static_cast<size_t>(vocab_size_));
  if (it == table_.end()) {
    const double lp = -std::log(static_cast<double>(vocab_size_));
    std::fill(out.begin(), out.end(), lp);
  } else {
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(it->second[i]);
  }
  return out;
}

}  // namespace ksr
