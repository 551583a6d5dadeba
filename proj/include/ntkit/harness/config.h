// ntkit/include/ntkit/harness/config.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_HARNESS_CONFIG_H_
#define NTKIT_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ntkit/decoder/beam_search.h"
#include "ntkit/models/model.h"
#include "ntkit/tokenizer/inventory.h"

namespace ntkit {

// Flat key=value experiment description. Keys are the member names below;
// `#` starts a comment.
struct ExperimentConfig {
  ModelMode mode = ModelMode::kNt;
  // Window
  std::size_t W = 5;
  std::size_t k = 20;
  std::size_t lookahead = 5;
  // Model
  std::size_t heads = 1;
  std::size_t encoder_layers = 2;
  std::size_t encoder_width = 64;
  std::size_t decoder_layers = 2;
  std::size_t decoder_width = 64;
  std::size_t embed_dim = 32;
  std::size_t attention_dim = 0;
  // Tokenizer
  TokenizerMode tokenizer = TokenizerMode::kGrapheme;
  std::size_t wpm_size = 200;
  std::string inventory;  // optional path; built from train_corpus otherwise
  // Cap M; 0 means 2 + the largest block load in the training corpus.
  std::size_t M = 0;
  // Decoding
  std::size_t beam = 8;
  std::size_t max_len = 0;  // LAS; 0 means 2 x the longest training target
  std::size_t lm_order = 3;
  std::string lm;  // optional LM path used for fusion
  double lambda = 0.0;
  double eta = 0.0;
  double beta = 0.5;
  // Training
  std::size_t steps = 2000;
  std::size_t batch_size = 8;
  double lr = 2e-3;
  // Fraction of lr reached at the last step; decay is linear over the second half.
  double lr_floor = 1.0;
  double clip = 5.0;
  std::size_t eval_every = 0;  // 0: only at the end
  std::size_t eval_wer_utterances = 0;  // 0: whole eval corpus
  std::uint64_t seed = 1;
  std::string train_corpus;
  std::string eval_corpus;
  std::string init_checkpoint;  // LAS checkpoint for NT initialization
  std::string output_dir;

  // Throws ConfigError for unknown keys or bad values.
  void set(const std::string &key, const std::string &value);
  // Throws ConfigError on out-of-range values.
  void validate() const;
  // Throws ValidationError when a referenced file does not exist.
  void check_files() const;

  // Canonical key=value text (every key, fixed order).
  std::string serialize() const;
  std::string hash() const;

  ModelConfig model_config(std::size_t input_dim, std::size_t vocab_size) const;
  WindowSpec window() const { return {W, k, lookahead, kFrameShiftMs}; }

  // Every key, in serialization order.
  static std::vector<std::string> keys();
  static ExperimentConfig parse(const std::string &text);
  static ExperimentConfig load(const std::string &path);

  bool operator==(const ExperimentConfig &) const = default;
};

}  // namespace ntkit

#endif  // NTKIT_HARNESS_CONFIG_H_
