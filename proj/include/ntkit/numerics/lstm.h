// ntkit/include/ntkit/numerics/lstm.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_NUMERICS_LSTM_H_
#define NTKIT_NUMERICS_LSTM_H_

#include <cstddef>
#include <random>
#include <span>

#include "ntkit/numerics/tensor.h"

namespace ntkit {

// One LSTM layer without peepholes. Gate blocks in the 4H rows are ordered
// input, forget, candidate, output.
struct LstmLayer {
  Tensor2 wx;    // 4H x input_dim
  Tensor2 wh;    // 4H x H
  Tensor2 bias;  // 4H x 1

  LstmLayer() = default;
  LstmLayer(std::size_t input_dim, std::size_t hidden);

  std::size_t hidden() const { return wh.cols; }
  std::size_t input_dim() const { return wx.cols; }

  // Weights U[-0.05, 0.05], forget-gate bias 1.0, other biases 0.
  void init(std::mt19937_64 &rng);

  bool operator==(const LstmLayer &) const = default;
};

struct LstmState {
  Vec cell;
  Vec hidden;

  LstmState() = default;
  explicit LstmState(std::size_t width) : cell(width, 0.0), hidden(width, 0.0) {}

  bool operator==(const LstmState &) const = default;
};

struct LstmCache;

struct LstmGrads {
  Tensor2 wx, wh, bias;

  explicit LstmGrads(const LstmLayer &layer, bool defer = false)
      : wx(layer.wx.rows, layer.wx.cols),
        wh(layer.wh.rows, layer.wh.cols),
        bias(layer.bias.rows, 1),
        defer_(defer) {}

  // With defer set, lstm_backward queues the weight outer products and
  // flush() adds them row by row. Same sums, same order, better locality.
  // The queued caches must stay alive until flush().
  bool deferred() const { return defer_; }
  void queue(Vec d_pre, const LstmCache *cache);
  void flush();

 private:
  bool defer_ = false;
  std::vector<Vec> pending_d_pre_;
  std::vector<const LstmCache *> pending_cache_;
};

// What the backward pass needs from one forward step.
struct LstmCache {
  Vec input;
  LstmState prev;
  Vec gates;      // post-activation, 4H in gate order
  Vec cell;       // new cell
  Vec tanh_cell;  // tanh(new cell)
};

struct LstmStepResult {
  Vec output;
  LstmState next;
};

// Validates operand shapes and runs one step.
LstmStepResult lstm_step(const LstmLayer &layer, std::span<const double> input,
                         const LstmState &state);

// Same as lstm_step but records a cache for lstm_backward. `input` may be a
// concatenation of two spans (the decoder feeds [embedding; context]).
LstmState lstm_step_cached(const LstmLayer &layer,
                           std::span<const double> input_a,
                           std::span<const double> input_b,
                           const LstmState &state, LstmCache *cache);

// Backward through one cached step. d_hidden and d_cell are gradients with
// respect to the step's outputs; on return d_input (sized input_dim, added
// into), d_prev_hidden and d_prev_cell hold gradients for the step's inputs.
void lstm_backward(const LstmLayer &layer, const LstmCache &cache,
                   std::span<const double> d_hidden,
                   std::span<const double> d_cell, LstmGrads &grads,
                   std::span<double> d_input, Vec &d_prev_hidden,
                   Vec &d_prev_cell);

}  // namespace ntkit

#endif  // NTKIT_NUMERICS_LSTM_H_
