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

#include <vector>

#include "ksr/matrix.hpp"

namespace ksr {

// Queries, keys and values for one attention call.  K and V must agree on the
// number of rows (n_k); Q and K must agree on the feature width for the dot
// mechanisms (additive attention allows them to differ).
struct AttentionInput {
  Matrix Q;  // n_q x d_q
  Matrix K;  // n_k x d_k
  Matrix V;  // n_k x d_v
};

struct AttentionResult {
  Matrix weights;  // n_q x n_k, rows are probability distributions
  Matrix context;  // n_q x d_v
};

// score(q, k) = w2' * tanh(W1 * [q; k])
struct AdditiveParams {
  Matrix W1;               // h x (d_q + d_k)
  std::vector<double> w2;  // h

  static AdditiveParams zeros(int hidden, int d_q, int d_k);
};

// score_j = w' * tanh(Wq*q + Wk*k_j + U*phi_j + b) where phi is the previous
// alignment convolved with `conv_kernel` (r filters of odd width c, centered,
// zero padded).  One query step at a time, the way a speller consumes it.
struct LocationParams {
  Matrix conv_kernel;     // r x c
  Matrix U;               // hidden x r
  Matrix W_q;             // hidden x d_q
  Matrix W_k;             // hidden x d_k
  std::vector<double> w;  // hidden
  std::vector<double> b;  // hidden

  static LocationParams zeros(int hidden, int d_q, int d_k, int filters = 10,
                              int width = 3);
};

// Per-head projections mapping d_model down to d_model/h, plus the output
// projection applied to the concatenated head contexts.
struct MultiHeadParams {
  int heads{1};
  std::vector<Matrix> W_q;  // each d_model x (d_model/h)
  std::vector<Matrix> W_k;
  std::vector<Matrix> W_v;
  Matrix W_o;               // d_model x d_model

  // h=1 with identity projections: reduces multi-head to plain scaled dot.
  static MultiHeadParams identity(int d_model);
};

struct MultiHeadResult {
  std::vector<Matrix> head_weights;  // h matrices, each n_q x n_k
  Matrix context;                    // n_q x d_model
};

struct AttentionGradients {
  Matrix dQ;
  Matrix dK;
  Matrix dV;
};

// softmax(Q K' / sqrt(d_k)) V; `scaled` off drops the sqrt(d_k) divisor.
AttentionResult dot_attention(const AttentionInput& in, bool scaled);

AttentionResult additive_attention(const AttentionInput& in, const AdditiveParams& p);

// prev_alignment must be non-negative and sum to 1 within 1e-6, or be all
// zero (the conventional first-step alignment).  Q contributes its first row
// only — the kernel processes a single decoding step.
AttentionResult location_aware_attention(const AttentionInput& in,
                                         const std::vector<double>& prev_alignment,
                                         const LocationParams& p);

MultiHeadResult multi_head_attention(const AttentionInput& in, const MultiHeadParams& p);

// Analytic gradients of loss = <upstream, dot_attention(in, scaled=true).context>
// through the softmax Jacobian; paired with a finite-difference oracle in the
// test suite.
AttentionGradients scaled_dot_backward(const AttentionInput& in, const Matrix& upstream);

// ---------------------------------------------------------------------------
// Convolutional extractor shape arithmetic

// One stage of a 2-D front end over (time, freq) feature maps; `pool` stages
// keep their input channel count.
struct ExtractorLayer {
  int kernel_t{1}, kernel_f{1};
  int stride_t{1}, stride_f{1};
  int pad_t{0}, pad_f{0};
  int out_channels{1};
  bool pool{false};
};

struct ExtractorSpec {
  enum class Kind { ds2, vgg };
  Kind kind{Kind::vgg};
  std::vector<ExtractorLayer> layers;

  // Two big strided convolutions, 32 channels: 41x11 stride (2,2) then 21x11
  // stride (2,1), both unpadded (kernel/stride given as freq x time).
  static ExtractorSpec ds2();
  // Four shape-preserving 3x3 convolutions (64, 64, 128, 128 channels) with
  // a 3x3 stride-2 max-pool after each pair.
  static ExtractorSpec vgg();
};

struct ExtractedShape {
  long long time{0};
  long long freq{0};
  int channels{0};
};

// Applies out = floor((n + 2*pad - kernel)/stride) + 1 per axis per layer.
// Raises Error(input_too_small) when any layer's window does not fit.
ExtractedShape extractor_output_shape(const ExtractorSpec& spec, long long time,
                                      long long freq);

// Recurrent sizes of the surrounding architecture, recorded for shape math
// only (no recurrence is implemented here).
constexpr int kListenerBlstmLayers = 3;
constexpr int kListenerBlstmUnits = 512;
constexpr int kSpellerLstmLayers = 2;
constexpr int kSpellerLstmUnits = 1024;
constexpr int kBaselineAttentionHeads = 4;

}  // namespace ksr
