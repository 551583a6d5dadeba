// ntkit/src/numerics/attention.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/numerics/attention.h"

#include <algorithm>
#include <cmath>

#include "ntkit/error.h"

namespace ntkit {

void AttentionParams::init(std::mt19937_64 &rng) {
  fill_uniform(wq, 0.05, rng);
  fill_uniform(wk, 0.05, rng);
  fill_uniform(v, 0.05, rng);
}

void check_heads(const AttentionParams &params, std::size_t value_width,
                 std::size_t heads) {
  if (heads == 0 || params.attention_dim() % heads != 0 ||
      value_width % heads != 0) {
    throw ConfigError("attention heads=" + std::to_string(heads) +
                      " must divide attention dim " +
                      std::to_string(params.attention_dim()) +
                      " and value width " + std::to_string(value_width));
  }
}

Tensor2 project_keys(const AttentionParams &params, const Tensor2 &keys) {
  require_dim(keys.cols, params.wk.cols, "attention keys width");
  Tensor2 out(keys.rows, params.attention_dim());
  for (std::size_t i = 0; i < keys.rows; ++i) {
    matvec_acc(params.wk, keys.row(i), out.row(i));
  }
  return out;
}

void project_keys_backward(const AttentionParams &params, const Tensor2 &keys,
                           const Tensor2 &d_projected_keys,
                           AttentionGrads &grads, Tensor2 &d_keys) {
  for (std::size_t i = 0; i < keys.rows; ++i) {
    const auto dpk = d_projected_keys.row(i);
    outer_acc(dpk, keys.row(i), 0, grads.wk);
    matvec_t_acc(params.wk, dpk, d_keys.row(i));
  }
}

AttentionContext attend_window(const AttentionParams &params,
                               std::size_t heads, std::span<const double> query,
                               const Tensor2 &projected_keys,
                               const Tensor2 &values, std::size_t begin,
                               std::size_t end, AttentionCache *cache) {
  if (end <= begin) throw EmptyWindowError("attention over zero rows");
  const std::size_t a_dim = params.attention_dim();
  const std::size_t n = end - begin;
  const std::size_t a_per_head = a_dim / heads;
  const std::size_t e_per_head = values.cols / heads;

  Vec qp(a_dim, 0.0);
  matvec_acc(params.wq, query, qp);

  Tensor2 act(n, a_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pk = projected_keys.row(begin + i);
    auto out = act.row(i);
    for (std::size_t a = 0; a < a_dim; ++a) out[a] = std::tanh(qp[a] + pk[a]);
  }

  AttentionContext result;
  result.context.assign(values.cols, 0.0);
  result.head_weights.resize(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t a0 = h * a_per_head;
    Vec &w = result.head_weights[h];
    w.resize(n);
    double max_score = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = act.row(i);
      double s = 0.0;
      for (std::size_t a = a0; a < a0 + a_per_head; ++a) s += params.v.data[a] * row[a];
      w[i] = s;
      max_score = std::max(max_score, s);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::exp(w[i] - max_score);
      z += w[i];
    }
    for (std::size_t i = 0; i < n; ++i) w[i] /= z;

    const std::size_t e0 = h * e_per_head;
    for (std::size_t i = 0; i < n; ++i) {
      const auto val = values.row(begin + i);
      const double wi = w[i];
      for (std::size_t c = e0; c < e0 + e_per_head; ++c) {
        result.context[c] += wi * val[c];
      }
    }
  }

  if (heads == 1) {
    result.weights = result.head_weights[0];
  } else {
    result.weights.assign(n, 0.0);
    for (const Vec &w : result.head_weights) {
      for (std::size_t i = 0; i < n; ++i) result.weights[i] += w[i];
    }
    for (double &w : result.weights) w /= static_cast<double>(heads);
  }

  if (cache != nullptr) {
    cache->begin = begin;
    cache->end = end;
    cache->query.assign(query.begin(), query.end());
    cache->query_proj = std::move(qp);
    cache->act = std::move(act);
  }
  return result;
}

namespace {

void validate(const AttentionParams &params, std::span<const double> query,
              const Tensor2 &keys, const Tensor2 &values) {
  if (keys.rows == 0 || values.rows == 0) {
    throw EmptyWindowError("attention over zero rows");
  }
  require_dim(values.rows, keys.rows, "attention values rows");
  require_dim(query.size(), params.wq.cols, "attention query");
  require_dim(params.wk.rows, params.attention_dim(), "attention wk rows");
  require_dim(params.wq.rows, params.attention_dim(), "attention wq rows");
}

}  // namespace

AttentionContext additive_attention(const AttentionParams &params,
                                    std::span<const double> query,
                                    const Tensor2 &keys,
                                    const Tensor2 &values) {
  validate(params, query, keys, values);
  const Tensor2 pk = project_keys(params, keys);
  return attend_window(params, 1, query, pk, values, 0, keys.rows, nullptr);
}

AttentionContext multihead_attention(const AttentionParams &params,
                                     std::span<const double> query,
                                     const Tensor2 &keys, const Tensor2 &values,
                                     std::size_t heads) {
  check_heads(params, values.cols, heads);
  validate(params, query, keys, values);
  const Tensor2 pk = project_keys(params, keys);
  return attend_window(params, heads, query, pk, values, 0, keys.rows, nullptr);
}

void attention_backward(const AttentionParams &params, std::size_t heads,
                        const AttentionCache &cache,
                        const AttentionContext &out, const Tensor2 &values,
                        std::span<const double> d_context,
                        AttentionGrads &grads, std::span<double> d_query,
                        Tensor2 &d_projected_keys, Tensor2 &d_values) {
  const std::size_t a_dim = params.attention_dim();
  const std::size_t n = cache.end - cache.begin;
  const std::size_t a_per_head = a_dim / heads;
  const std::size_t e_per_head = values.cols / heads;

  Vec d_qp(a_dim, 0.0);
  Vec d_w(n);
  for (std::size_t h = 0; h < heads; ++h) {
    const Vec &w = out.head_weights[h];
    const std::size_t e0 = h * e_per_head;
    const std::size_t a0 = h * a_per_head;

    // context_c = sum_i w_i value_ic over this head's slice
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto val = values.row(cache.begin + i);
      auto dval = d_values.row(cache.begin + i);
      double s = 0.0;
      for (std::size_t c = e0; c < e0 + e_per_head; ++c) {
        s += d_context[c] * val[c];
        dval[c] += w[i] * d_context[c];
      }
      d_w[i] = s;
      dot += w[i] * s;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double d_score = w[i] * (d_w[i] - dot);
      if (d_score == 0.0) continue;
      const auto act = cache.act.row(i);
      auto dpk = d_projected_keys.row(cache.begin + i);
      for (std::size_t a = a0; a < a0 + a_per_head; ++a) {
        grads.v.data[a] += d_score * act[a];
        const double d_pre =
            d_score * params.v.data[a] * (1.0 - act[a] * act[a]);
        d_qp[a] += d_pre;
        dpk[a] += d_pre;
      }
    }
  }
  outer_acc(d_qp, cache.query, 0, grads.wq);
  matvec_t_acc(params.wq, d_qp, d_query);
}

}  // namespace ntkit
