// ntkit/include/ntkit/numerics/attention.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_NUMERICS_ATTENTION_H_
#define NTKIT_NUMERICS_ATTENTION_H_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ntkit/numerics/tensor.h"

namespace ntkit {

// Additive (Bahdanau) attention projections:
//   e_i = v . tanh(Wq q + Wk k_i)
// With heads > 1 the A projection rows are split into `heads` equal groups and
// each group attends over its own column slice of the values.
struct AttentionParams {
  Tensor2 wq;  // A x query_dim
  Tensor2 wk;  // A x key_dim
  Tensor2 v;   // A x 1

  AttentionParams() = default;
  AttentionParams(std::size_t query_dim, std::size_t key_dim,
                  std::size_t attention_dim)
      : wq(attention_dim, query_dim),
        wk(attention_dim, key_dim),
        v(attention_dim, 1) {}

  std::size_t attention_dim() const { return v.rows; }

  void init(std::mt19937_64 &rng);

  bool operator==(const AttentionParams &) const = default;
};

struct AttentionGrads {
  Tensor2 wq, wk, v;

  explicit AttentionGrads(const AttentionParams &p)
      : wq(p.wq.rows, p.wq.cols), wk(p.wk.rows, p.wk.cols), v(p.v.rows, 1) {}
};

struct AttentionContext {
  // Probability vector over attended rows; the head average when heads > 1.
  Vec weights;
  Vec context;
  std::vector<Vec> head_weights;
};

AttentionContext additive_attention(const AttentionParams &params,
                                    std::span<const double> query,
                                    const Tensor2 &keys, const Tensor2 &values);

AttentionContext multihead_attention(const AttentionParams &params,
                                     std::span<const double> query,
                                     const Tensor2 &keys, const Tensor2 &values,
                                     std::size_t heads);

// Throws ConfigError unless both the attention dim and value width split
// evenly into `heads`.
void check_heads(const AttentionParams &params, std::size_t value_width,
                 std::size_t heads);

// Wk k_i for every key row; computed once per utterance and shared by all
// decoder steps. Result is rows x A.
Tensor2 project_keys(const AttentionParams &params, const Tensor2 &keys);

// Backward of project_keys: grads.wk += dPK^T K, d_keys += dPK Wk.
void project_keys_backward(const AttentionParams &params, const Tensor2 &keys,
                           const Tensor2 &d_projected_keys,
                           AttentionGrads &grads, Tensor2 &d_keys);

struct AttentionCache {
  std::size_t begin = 0;
  std::size_t end = 0;
  Vec query;
  Vec query_proj;  // A
  Tensor2 act;     // (end - begin) x A, tanh activations
};

// Attention restricted to rows [begin, end) of pre-projected keys and values.
AttentionContext attend_window(const AttentionParams &params,
                               std::size_t heads, std::span<const double> query,
                               const Tensor2 &projected_keys,
                               const Tensor2 &values, std::size_t begin,
                               std::size_t end, AttentionCache *cache);

// Backward of attend_window. Accumulates into grads, d_query (sized like the
// query), d_projected_keys and d_values (full-size, rows in [begin, end) only).
void attention_backward(const AttentionParams &params, std::size_t heads,
                        const AttentionCache &cache,
                        const AttentionContext &out, const Tensor2 &values,
                        std::span<const double> d_context,
                        AttentionGrads &grads, std::span<double> d_query,
                        Tensor2 &d_projected_keys, Tensor2 &d_values);

}  // namespace ntkit

#endif  // NTKIT_NUMERICS_ATTENTION_H_
