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

#include "ksr/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ksr/common.hpp"

namespace ksr {

namespace {

// Row-wise softmax with max subtraction; safe for logits up to around +-700.
void softmax_rows(Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    double* row = m.row(i);
    double mx = row[0];
    for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (int j = 0; j < m.cols(); ++j) row[j] /= sum;
  }
}

void check_kv(const AttentionInput& in) {
  if (in.K.rows() != in.V.rows())
    raise(Errc::shape_mismatch,
          "K has " + std::to_string(in.K.rows()) + " rows but V has " +
              std::to_string(in.V.rows()));
  if (in.Q.rows() < 1 || in.K.rows() < 1)
    raise(Errc::shape_mismatch, "need at least one query and one key");
}

}  // namespace

AttentionResult dot_attention(const AttentionInput& in, bool scaled) {
  check_kv(in);
  if (in.Q.cols() != in.K.cols())
    raise(Errc::shape_mismatch, "query width differs from key width");

  Matrix logits = matmul(in.Q, transpose(in.K));
  if (scaled) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(in.K.cols()));
    for (double& v : logits.data()) v *= inv;
  }
  softmax_rows(logits);
  Matrix context = matmul(logits, in.V);
  return {std::move(logits), std::move(context)};
}

AdditiveParams AdditiveParams::zeros(int hidden, int d_q, int d_k) {
  AdditiveParams p;
  p.W1 = Matrix(hidden, d_q + d_k);
  p.w2.assign(static_cast<size_t>(hidden), 0.0);
  return p;
}

AttentionResult additive_attention(const AttentionInput& in, const AdditiveParams& p) {
  check_kv(in);
  const int d_q = in.Q.cols();
  const int d_k = in.K.cols();
  const int hidden = p.W1.rows();
  if (p.W1.cols() != d_q + d_k)
    raise(Errc::shape_mismatch,
          "W1 expects " + std::to_string(p.W1.cols()) + " concatenated features, got " +
              std::to_string(d_q + d_k));
  if (static_cast<int>(p.w2.size()) != hidden)
    raise(Errc::shape_mismatch, "w2 length differs from W1 rows");

  Matrix logits(in.Q.rows(), in.K.rows());
  std::vector<double> hid(static_cast<size_t>(hidden));
  for (int i = 0; i < in.Q.rows(); ++i) {
    const double* q = in.Q.row(i);
    for (int j = 0; j < in.K.rows(); ++j) {
      const double* k = in.K.row(j);
      for (int h = 0; h < hidden; ++h) {
        const double* w1 = p.W1.row(h);
        double acc = 0.0;
        for (int c = 0; c < d_q; ++c) acc += w1[c] * q[c];
        for (int c = 0; c < d_k; ++c) acc += w1[d_q + c] * k[c];
        hid[static_cast<size_t>(h)] = std::tanh(acc);
      }
      double score = 0.0;
      for (int h = 0; h < hidden; ++h) score += p.w2[static_cast<size_t>(h)] * hid[static_cast<size_t>(h)];
      logits(i, j) = score;
    }
  }
  softmax_rows(logits);
  Matrix context = matmul(logits, in.V);
  return {std::move(logits), std::move(context)};
}

LocationParams LocationParams::zeros(int hidden, int d_q, int d_k, int filters,
                                     int width) {
  LocationParams p;
  p.conv_kernel = Matrix(filters, width);
  p.U = Matrix(hidden, filters);
  p.W_q = Matrix(hidden, d_q);
  p.W_k = Matrix(hidden, d_k);
  p.w.assign(static_cast<size_t>(hidden), 0.0);
  p.b.assign(static_cast<size_t>(hidden), 0.0);
  return p;
}

AttentionResult location_aware_attention(const AttentionInput& in,
                                         const std::vector<double>& prev_alignment,
                                         const LocationParams& p) {
  check_kv(in);
  const int n_k = in.K.rows();
  const int hidden = static_cast<int>(p.w.size());
  const int filters = p.conv_kernel.rows();
  const int width = p.conv_kernel.cols();
  if (width % 2 == 0)
    raise(Errc::bad_argument, "convolution width must be odd for a centered window");
  if (p.U.rows() != hidden || p.U.cols() != filters || p.W_q.rows() != hidden ||
      p.W_k.rows() != hidden || static_cast<int>(p.b.size()) != hidden)
    raise(Errc::shape_mismatch, "location parameter shapes disagree");
  if (p.W_q.cols() != in.Q.cols() || p.W_k.cols() != in.K.cols())
    raise(Errc::shape_mismatch, "projection widths disagree with Q/K");
  if (static_cast<int>(prev_alignment.size()) != n_k)
    raise(Errc::shape_mismatch, "previous alignment length differs from key count");

  double align_sum = 0.0;
  for (double a : prev_alignment) {
    if (a < 0.0) raise(Errc::bad_alignment, "alignment entries must be non-negative");
    align_sum += a;
  }
  if (align_sum != 0.0 && std::abs(align_sum - 1.0) > 1e-6)
    raise(Errc::bad_alignment, "alignment must sum to 1 (or be all zero)");

  // phi[j] = conv_kernel * prev_alignment around j, zero padded at the ends.
  Matrix phi(n_k, filters);
  const int half = width / 2;
  for (int j = 0; j < n_k; ++j) {
    for (int f = 0; f < filters; ++f) {
      double acc = 0.0;
      for (int u = 0; u < width; ++u) {
        const int src = j + u - half;
        if (src >= 0 && src < n_k)
          acc += p.conv_kernel(f, u) * prev_alignment[static_cast<size_t>(src)];
      }
      phi(j, f) = acc;
    }
  }

  const double* q = in.Q.row(0);  // single decoding step
  std::vector<double> q_proj(static_cast<size_t>(hidden));
  for (int h = 0; h < hidden; ++h) {
    const double* wq = p.W_q.row(h);
    double acc = 0.0;
    for (int c = 0; c < in.Q.cols(); ++c) acc += wq[c] * q[c];
    q_proj[static_cast<size_t>(h)] = acc;
  }

  Matrix logits(1, n_k);
  for (int j = 0; j < n_k; ++j) {
    const double* k = in.K.row(j);
    const double* ph = phi.row(j);
    double score = 0.0;
    for (int h = 0; h < hidden; ++h) {
      const double* wk = p.W_k.row(h);
      const double* u = p.U.row(h);
      double acc = q_proj[static_cast<size_t>(h)] + p.b[static_cast<size_t>(h)];
      for (int c = 0; c < in.K.cols(); ++c) acc += wk[c] * k[c];
      for (int f = 0; f < filters; ++f) acc += u[f] * ph[f];
      score += p.w[static_cast<size_t>(h)] * std::tanh(acc);
    }
    logits(0, j) = score;
  }
  softmax_rows(logits);
  Matrix context = matmul(logits, in.V);
  return {std::move(logits), std::move(context)};
}

MultiHeadParams MultiHeadParams::identity(int d_model) {
  MultiHeadParams p;
  p.heads = 1;
  p.W_q = {Matrix::identity(d_model)};
  p.W_k = {Matrix::identity(d_model)};
  p.W_v = {Matrix::identity(d_model)};
  p.W_o = Matrix::identity(d_model);
  return p;
}

MultiHeadResult multi_head_attention(const AttentionInput& in, const MultiHeadParams& p) {
  check_kv(in);
  const int d_model = in.Q.cols();
  if (in.K.cols() != d_model || in.V.cols() != d_model)
    raise(Errc::shape_mismatch, "multi-head expects Q, K, V all of width d_model");
  if (p.heads < 1 || d_model % p.heads != 0)
    raise(Errc::indivisible_heads,
          "d_model " + std::to_string(d_model) + " is not divisible by " +
              std::to_string(p.heads) + " heads");
  const int d_head = d_model / p.heads;
  const size_t h_count = static_cast<size_t>(p.heads);
  if (p.W_q.size() != h_count || p.W_k.size() != h_count || p.W_v.size() != h_count)
    raise(Errc::shape_mismatch, "need one Q/K/V projection per head");
  for (size_t i = 0; i < h_count; ++i)
    if (p.W_q[i].rows() != d_model || p.W_q[i].cols() != d_head ||
        p.W_k[i].rows() != d_model || p.W_k[i].cols() != d_head ||
        p.W_v[i].rows() != d_model || p.W_v[i].cols() != d_head)
      raise(Errc::shape_mismatch, "head projection must be d_model x d_model/h");
  if (p.W_o.rows() != d_model || p.W_o.cols() != d_model)
    raise(Errc::shape_mismatch, "output projection must be d_model x d_model");

  MultiHeadResult out;
  out.head_weights.reserve(h_count);
  Matrix concat(in.Q.rows(), d_model);
  for (int h = 0; h < p.heads; ++h) {
    AttentionInput head;
    head.Q = matmul(in.Q, p.W_q[static_cast<size_t>(h)]);
    head.K = matmul(in.K, p.W_k[static_cast<size_t>(h)]);
    head.V = matmul(in.V, p.W_v[static_cast<size_t>(h)]);
    AttentionResult r = dot_attention(head, /*scaled=*/true);
    for (int i = 0; i < concat.rows(); ++i)
      for (int j = 0; j < d_head; ++j) concat(i, h * d_head + j) = r.context(i, j);
    out.head_weights.push_back(std::move(r.weights));
  }
  out.context = matmul(concat, p.W_o);
  return out;
}

AttentionGradients scaled_dot_backward(const AttentionInput& in, const Matrix& upstream) {
  check_kv(in);
  if (in.Q.cols() != in.K.cols())
    raise(Errc::shape_mismatch, "query width differs from key width");
  if (upstream.rows() != in.Q.rows() || upstream.cols() != in.V.cols())
    raise(Errc::shape_mismatch, "upstream gradient must be n_q x d_v");

  const double inv = 1.0 / std::sqrt(static_cast<double>(in.K.cols()));
  AttentionResult fwd = dot_attention(in, /*scaled=*/true);
  const Matrix& W = fwd.weights;

  // loss = <upstream, W V>  =>  dW = upstream V'; back through the softmax:
  // dS_ij = W_ij (dW_ij - sum_l W_il dW_il), with S the scaled logits.
  Matrix dW = matmul(upstream, transpose(in.V));
  Matrix dS(W.rows(), W.cols());
  for (int i = 0; i < W.rows(); ++i) {
    double dot = 0.0;
    for (int l = 0; l < W.cols(); ++l) dot += W(i, l) * dW(i, l);
    for (int j = 0; j < W.cols(); ++j) dS(i, j) = W(i, j) * (dW(i, j) - dot);
  }
  for (double& v : dS.data()) v *= inv;  // S = Q K' / sqrt(d_k)

  AttentionGradients g;
  g.dQ = matmul(dS, in.K);
  g.dK = matmul(transpose(dS), in.Q);
  g.dV = matmul(transpose(W), upstream);
  return g;
}

// ---------------------------------------------------------------------------
// Extractor shape arithmetic

ExtractorSpec ExtractorSpec::ds2() {
  ExtractorSpec s;
  s.kind = Kind::ds2;
  s.layers = {
      {/*kernel_t=*/11, /*kernel_f=*/41, /*stride_t=*/2, /*stride_f=*/2,
       /*pad_t=*/0, /*pad_f=*/0, /*out_channels=*/32, /*pool=*/false},
      {/*kernel_t=*/11, /*kernel_f=*/21, /*stride_t=*/1, /*stride_f=*/2,
       /*pad_t=*/0, /*pad_f=*/0, /*out_channels=*/32, /*pool=*/false},
  };
  return s;
}

ExtractorSpec ExtractorSpec::vgg() {
  ExtractorSpec s;
  s.kind = Kind::vgg;
  const auto conv = [](int ch) {
    return ExtractorLayer{3, 3, 1, 1, 1, 1, ch, false};
  };
  const ExtractorLayer pool{3, 3, 2, 2, 0, 0, 0, true};
  s.layers = {conv(64), conv(64), pool, conv(128), conv(128), pool};
  return s;
}

ExtractedShape extractor_output_shape(const ExtractorSpec& spec, long long time,
                                      long long freq) {
  if (time < 1 || freq < 1) raise(Errc::input_too_small, "empty input plane");
  ExtractedShape out{time, freq, 1};
  int layer_idx = 0;
  for (const ExtractorLayer& l : spec.layers) {
    const long long eff_t = out.time + 2 * l.pad_t - l.kernel_t;
    const long long eff_f = out.freq + 2 * l.pad_f - l.kernel_f;
    if (eff_t < 0 || eff_f < 0)
      raise(Errc::input_too_small,
            "layer " + std::to_string(layer_idx) + " window (" +
                std::to_string(l.kernel_t) + "x" + std::to_string(l.kernel_f) +
                ") exceeds its input (" + std::to_string(out.time) + "x" +
                std::to_string(out.freq) + ")");
    out.time = eff_t / l.stride_t + 1;
    out.freq = eff_f / l.stride_f + 1;
    if (!l.pool) out.channels = l.out_channels;
    ++layer_idx;
  }
  return out;
}

}  // namespace ksr
