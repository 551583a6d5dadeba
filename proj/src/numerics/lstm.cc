// ntkit/src/numerics/lstm.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/numerics/lstm.h"

#include <cmath>

#include "ntkit/error.h"

namespace ntkit {

LstmLayer::LstmLayer(std::size_t input_dim, std::size_t hidden)
    : wx(4 * hidden, input_dim), wh(4 * hidden, hidden), bias(4 * hidden, 1) {}

void LstmLayer::init(std::mt19937_64 &rng) {
  fill_uniform(wx, 0.05, rng);
  fill_uniform(wh, 0.05, rng);
  bias.set_zero();
  const std::size_t h = hidden();
  for (std::size_t j = 0; j < h; ++j) bias.data[h + j] = 1.0;
}

namespace {

LstmState step_impl(const LstmLayer &layer, std::span<const double> input_a,
                    std::span<const double> input_b, const LstmState &state,
                    LstmCache *cache) {
  const std::size_t h = layer.hidden();
  Vec pre(layer.bias.data);
  matvec_acc_cols(layer.wx, 0, input_a, pre);
  if (!input_b.empty()) {
    matvec_acc_cols(layer.wx, input_a.size(), input_b, pre);
  }
  matvec_acc(layer.wh, state.hidden, pre);

  LstmState next(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double i = sigmoid(pre[j]);
    const double f = sigmoid(pre[h + j]);
    const double g = std::tanh(pre[2 * h + j]);
    const double o = sigmoid(pre[3 * h + j]);
    pre[j] = i;
    pre[h + j] = f;
    pre[2 * h + j] = g;
    pre[3 * h + j] = o;
    next.cell[j] = f * state.cell[j] + i * g;
    next.hidden[j] = o * std::tanh(next.cell[j]);
  }

  if (cache != nullptr) {
    cache->input.assign(input_a.begin(), input_a.end());
    cache->input.insert(cache->input.end(), input_b.begin(), input_b.end());
    cache->prev = state;
    cache->cell = next.cell;
    cache->tanh_cell.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
      cache->tanh_cell[j] = std::tanh(next.cell[j]);
    }
    cache->gates = std::move(pre);
  }
  return next;
}

}  // namespace

LstmStepResult lstm_step(const LstmLayer &layer, std::span<const double> input,
                         const LstmState &state) {
  require_dim(input.size(), layer.input_dim(), "lstm input");
  require_dim(state.hidden.size(), layer.hidden(), "lstm state.hidden");
  require_dim(state.cell.size(), layer.hidden(), "lstm state.cell");
  require_dim(layer.bias.rows, 4 * layer.hidden(), "lstm bias");
  LstmState next = step_impl(layer, input, {}, state, nullptr);
  Vec out = next.hidden;
  return {std::move(out), std::move(next)};
}

LstmState lstm_step_cached(const LstmLayer &layer,
                           std::span<const double> input_a,
                           std::span<const double> input_b,
                           const LstmState &state, LstmCache *cache) {
  require_dim(input_a.size() + input_b.size(), layer.input_dim(), "lstm input");
  require_dim(state.hidden.size(), layer.hidden(), "lstm state.hidden");
  return step_impl(layer, input_a, input_b, state, cache);
}

void lstm_backward(const LstmLayer &layer, const LstmCache &cache,
                   std::span<const double> d_hidden,
                   std::span<const double> d_cell, LstmGrads &grads,
                   std::span<double> d_input, Vec &d_prev_hidden,
                   Vec &d_prev_cell) {
  const std::size_t h = layer.hidden();
  Vec d_pre(4 * h);
  d_prev_cell.assign(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    const double i = cache.gates[j];
    const double f = cache.gates[h + j];
    const double g = cache.gates[2 * h + j];
    const double o = cache.gates[3 * h + j];
    const double tc = cache.tanh_cell[j];
    const double dc = d_cell[j] + d_hidden[j] * o * (1.0 - tc * tc);
    d_pre[j] = dc * g * i * (1.0 - i);
    d_pre[h + j] = dc * cache.prev.cell[j] * f * (1.0 - f);
    d_pre[2 * h + j] = dc * i * (1.0 - g * g);
    d_pre[3 * h + j] = d_hidden[j] * tc * o * (1.0 - o);
    d_prev_cell[j] = dc * f;
  }
  for (std::size_t r = 0; r < 4 * h; ++r) grads.bias.data[r] += d_pre[r];
  matvec_t_acc(layer.wx, d_pre, d_input);
  d_prev_hidden.assign(h, 0.0);
  matvec_t_acc(layer.wh, d_pre, d_prev_hidden);
  if (grads.deferred()) {
    grads.queue(std::move(d_pre), &cache);
  } else {
    outer_acc(d_pre, cache.input, 0, grads.wx);
    outer_acc(d_pre, cache.prev.hidden, 0, grads.wh);
  }
}

void LstmGrads::queue(Vec d_pre, const LstmCache *cache) {
  pending_d_pre_.push_back(std::move(d_pre));
  pending_cache_.push_back(cache);
}

void LstmGrads::flush() {
  const std::size_t n = pending_cache_.size();
  for (std::size_t r = 0; r < wx.rows; ++r) {
    double *gx = wx.data.data() + r * wx.cols;
    double *gh = wh.data.data() + r * wh.cols;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = pending_d_pre_[k][r];
      if (d == 0.0) continue;
      const Vec &in = pending_cache_[k]->input;
      const Vec &hid = pending_cache_[k]->prev.hidden;
      for (std::size_t c = 0; c < wx.cols; ++c) gx[c] += d * in[c];
      for (std::size_t c = 0; c < wh.cols; ++c) gh[c] += d * hid[c];
    }
  }
  pending_d_pre_.clear();
  pending_cache_.clear();
}

}  // namespace ntkit
