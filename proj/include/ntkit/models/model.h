// ntkit/include/ntkit/models/model.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_MODELS_MODEL_H_
#define NTKIT_MODELS_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ntkit/frontend/features.h"
#include "ntkit/numerics/attention.h"
#include "ntkit/numerics/lstm.h"
#include "ntkit/numerics/tensor.h"
#include "ntkit/targets/block_targets.h"
#include "ntkit/tokenizer/inventory.h"

namespace ntkit {

enum class ModelMode { kLas, kNt };

std::string_view model_mode_name(ModelMode mode);
ModelMode parse_model_mode(std::string_view name);

struct ModelConfig {
  std::size_t input_dim = 24;
  std::size_t encoder_layers = 2;
  std::size_t encoder_width = 64;
  std::size_t decoder_layers = 2;
  std::size_t decoder_width = 64;
  std::size_t embed_dim = 32;
  std::size_t attention_dim = 0;  // 0: same as decoder_width
  std::size_t heads = 1;
  std::size_t vocab_size = 0;

  std::size_t resolved_attention_dim() const {
    return attention_dim == 0 ? decoder_width : attention_dim;
  }
  // Throws ConfigError on zero sizes or indivisible heads.
  void validate() const;
  // Space-separated key=value list, used in checkpoint headers.
  std::string to_string() const;
  static ModelConfig from_string(const std::string &text);

  bool operator==(const ModelConfig &) const = default;
};

// Parameters shared by LAS and NT. The decoder's first layer reads
// [embedding(previous token); context]; logits come from [top hidden; context].
struct ModelParams {
  ModelConfig config;
  std::vector<LstmLayer> encoder;
  AttentionParams attention;  // query: decoder top hidden, key: encoder state
  Tensor2 embedding;          // V x E
  std::vector<LstmLayer> decoder;
  Tensor2 out_w;  // V x (decoder_width + encoder_width)
  Tensor2 out_b;  // V x 1

  ModelParams() = default;
  // All-zero parameters of the configured shapes.
  explicit ModelParams(const ModelConfig &config);

  void init(std::uint64_t seed);

  // Fixed field order used by flatten, checkpoints and gradient naming.
  void for_each_tensor(const std::function<void(const std::string &, Tensor2 &)> &fn);
  void for_each_tensor(
      const std::function<void(const std::string &, const Tensor2 &)> &fn) const;

  std::size_t num_params() const;
  Vec flatten() const;
  void unflatten(std::span<const double> flat);
  // "decoder.1.wh[3,7]" for a flat index.
  std::string param_name(std::size_t flat_index) const;

  // Throws ShapeError unless every tensor matches `config`.
  void validate_shapes() const;

  bool operator==(const ModelParams &) const = default;
};

// Attention window for a block.
struct WindowSpec {
  std::size_t W = 10;
  std::size_t k = 20;
  std::size_t lookahead = 5;
  int frame_ms = kFrameShiftMs;

  bool operator==(const WindowSpec &) const = default;
};

// Inclusive 1-based frame range.
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;
  bool operator==(const FrameRange &) const = default;
};

// [max(1, (b-k)W+1), min(T, bW+lookahead)] for 1-based block b, with k
// treated as at least 1 so the current block is always visible.
FrameRange attention_window(std::size_t block, const WindowSpec &spec,
                            std::size_t num_frames);

int latency_ms(const WindowSpec &spec);

// Unidirectional encoder stack; row t depends only on frames 0..t.
Tensor2 encode_utterance(const ModelParams &params, const FeatureSequence &x);

// Encoder output plus keys projected once for all decoder steps.
struct EncodedUtterance {
  Tensor2 states;
  Tensor2 projected_keys;
};

EncodedUtterance encode_for_attention(const ModelParams &params,
                                      const FeatureSequence &x);

struct DecoderState {
  std::vector<LstmState> layers;
  bool operator==(const DecoderState &) const = default;
};

DecoderState initial_decoder_state(const ModelParams &params);

struct StepOutput {
  Vec log_probs;             // V
  AttentionContext attention;  // weights over [begin, end)
  DecoderState next;
};

// One decoder step attending rows [begin, end) (0-based, half-open).
StepOutput decoder_step(const ModelParams &params, const EncodedUtterance &enc,
                        const DecoderState &state, TokenId previous,
                        std::size_t begin, std::size_t end);

struct ForwardResult {
  double loss = 0.0;                // mean negative log-prob
  Vec token_log_probs;              // log p(target_i)
  std::vector<Vec> distributions;   // full log-softmax per step
  std::vector<Vec> attention;       // weights over each step's window
  std::vector<std::size_t> window_begin;
  std::vector<std::size_t> block_of_step;  // 0-based
};

// Teacher-forced NT pass over the flattened targets; tokens of block b attend
// to attention_window(b).
ForwardResult nt_forward(const ModelParams &params, const FeatureSequence &x,
                         const BlockTargets &targets, const WindowSpec &spec);

// Teacher-forced pass attending to all frames at every step.
ForwardResult las_forward(const ModelParams &params, const FeatureSequence &x,
                          const std::vector<TokenId> &targets);

struct GradientResult {
  double loss = 0.0;
  std::size_t num_tokens = 0;
  ModelParams grads;  // d(loss)/d(params), same shapes as params
};

GradientResult nt_gradients(const ModelParams &params, const FeatureSequence &x,
                            const BlockTargets &targets, const WindowSpec &spec);

GradientResult las_gradients(const ModelParams &params, const FeatureSequence &x,
                             const std::vector<TokenId> &targets);

// Copies every parameter of a LAS model (trained with the epsilon row) into a
// fresh NT parameter record. Throws TransferError on inconsistent shapes, or
// when `nt_config` is given and differs from the LAS configuration.
ModelParams transfer_from_las(const ModelParams &las_params);
ModelParams transfer_from_las(const ModelParams &las_params,
                              const ModelConfig &nt_config);

}  // namespace ntkit

#endif  // NTKIT_MODELS_MODEL_H_
