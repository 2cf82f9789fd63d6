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
//
// Reference implementations the tests trust instead of the library: slow,
// obvious, written straight from the defining formulas.  Nothing here calls
// the code under test.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ksr/decode.hpp"
#include "ksr/matrix.hpp"
#include "ksr/rng.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Randomness for test instances

inline double uniform(ksr::SplitMix64& g, double lo, double hi) {
  const double u = static_cast<double>(g.next() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + u * (hi - lo);
}

inline ksr::Matrix random_matrix(int rows, int cols, ksr::SplitMix64& g,
                                 double lo = -1.0, double hi = 1.0) {
  ksr::Matrix m(rows, cols);
  for (double& v : m.data()) v = uniform(g, lo, hi);
  return m;
}

// ---------------------------------------------------------------------------
// Direct O(n^2) DFT of a real frame zero-padded to n_fft; bins 0..n_fft/2.

inline std::vector<std::complex<double>> dft(const std::vector<double>& x, int n_fft) {
  std::vector<std::complex<double>> bins(static_cast<size_t>(n_fft / 2 + 1));
  for (int k = 0; k <= n_fft / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t n = 0; n < x.size(); ++n) {
      const double angle = -2.0 * std::numbers::pi * k * static_cast<double>(n) / n_fft;
      acc += x[n] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    bins[static_cast<size_t>(k)] = acc;
  }
  return bins;
}

// ---------------------------------------------------------------------------
// Full-table Levenshtein; the library uses two rows.

template <typename Seq>
long long levenshtein_table(const Seq& a, const Seq& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<long long>> d(n + 1, std::vector<long long>(m + 1));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<long long>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<long long>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[n][m];
}

// ---------------------------------------------------------------------------
// Matrix comparison and finite differences

inline double max_abs(const ksr::Matrix& m) {
  double mx = 0.0;
  for (double v : m.data()) mx = std::max(mx, std::abs(v));
  return mx;
}

inline double rel_err(const ksr::Matrix& a, const ksr::Matrix& b) {
  double diff = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i)
    diff = std::max(diff, std::abs(a.data()[i] - b.data()[i]));
  return diff / std::max({max_abs(a), max_abs(b), 1e-8});
}

// Central finite differences of a scalar functional with respect to every
// entry of `m`; `loss` receives the perturbed matrix.
template <typename F>
ksr::Matrix fd_gradient(const ksr::Matrix& m, F loss, double step = 1e-5) {
  ksr::Matrix g(m.rows(), m.cols());
  ksr::Matrix work = m;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const double keep = work(i, j);
      work(i, j) = keep + step;
      const double up = loss(work);
      work(i, j) = keep - step;
      const double down = loss(work);
      work(i, j) = keep;
      g(i, j) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Exhaustive path enumeration over a posterior source (small V / max_len
// only).  Paths stop at eos or at max_len; scores are summed step log-probs.

struct Path {
  std::vector<int> tokens;  // starts with sos
  double log_prob{0.0};
  bool finished{false};
};

inline void enumerate_rec(const ksr::PosteriorSource& src, Path cur,
                          std::vector<Path>* out) {
  if (cur.finished || static_cast<int>(cur.tokens.size()) - 1 >= src.max_len()) {
    out->push_back(std::move(cur));
    return;
  }
  const std::vector<double> lp = src.log_probs(cur.tokens);
  for (int t = 0; t < src.vocab_size(); ++t) {
    Path next = cur;
    next.tokens.push_back(t);
    next.log_prob += lp[static_cast<size_t>(t)];
    next.finished = t == ksr::kEosId;
    enumerate_rec(src, std::move(next), out);
  }
}

inline std::vector<Path> enumerate_paths(const ksr::PosteriorSource& src) {
  std::vector<Path> out;
  Path root;
  root.tokens.push_back(ksr::kSosId);
  enumerate_rec(src, std::move(root), &out);
  return out;
}

// Best path by (score, lexicographic tokens) — the decoder's tie order.
inline const Path& best_path(const std::vector<Path>& paths) {
  const Path* best = &paths.front();
  for (const Path& p : paths) {
    if (p.log_prob > best->log_prob ||
        (p.log_prob == best->log_prob && p.tokens < best->tokens))
      best = &p;
  }
  return *best;
}

}  // namespace oracle
