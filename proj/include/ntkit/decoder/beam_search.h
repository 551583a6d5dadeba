// ntkit/include/ntkit/decoder/beam_search.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_DECODER_BEAM_SEARCH_H_
#define NTKIT_DECODER_BEAM_SEARCH_H_

#include <cstddef>
#include <string>
#include <vector>

#include "ntkit/frontend/features.h"
#include "ntkit/lm/ngram.h"
#include "ntkit/models/model.h"

namespace ntkit {

struct SearchOptions {
  ModelMode mode = ModelMode::kNt;
  WindowSpec window;
  std::size_t beam = 8;
  // NT: cap M on non-epsilon outputs per block. Ignored for LAS.
  std::size_t max_per_block = 4;
  // LAS: maximum output length before <eos> is forced.
  std::size_t max_len = 0;
  // Shallow fusion; a null LM means fusion is off.
  const NGramLM *lm = nullptr;
  FusionWeights fusion;
};

// Adds step attention (over absolute frames [offset, offset + size)) to the
// per-frame accumulator.
void update_coverage(Vec &attn_history, std::span<const double> weights,
                     std::size_t offset);
// Frames whose accumulated attention exceeds beta.
std::size_t coverage(const Vec &attn_history, double beta);

struct BeamEntry {
  std::vector<TokenId> tokens;  // including block-end tokens
  double score = 0.0;           // fused
  double score_model = 0.0;
  double score_lm = 0.0;
  double coverage = 0.0;

  bool operator==(const BeamEntry &) const = default;
};

// Survivors after each block, best first.
struct BlockDiagnostics {
  std::size_t block = 0;  // 0-based
  std::vector<BeamEntry> beam;
  std::size_t forced_end = 0;  // expansions where the cap forced the end token

  bool operator==(const BlockDiagnostics &) const = default;
};

struct DecodeResult {
  BeamEntry best;
  std::vector<TokenId> labels;  // best.tokens without end tokens
  Tensor2 attention;            // output steps x T, best hypothesis
  std::vector<BlockDiagnostics> blocks;
  std::size_t forced_end = 0;
};

// Block-synchronous beam search. NT: every block ends with epsilon, at most M
// other tokens per block, <sos>/<eos> never emitted. LAS: a single block over
// all frames ending with <eos>, epsilon and <sos> never emitted.
DecodeResult beam_search(const ModelParams &params, const FeatureSequence &x,
                         const SearchOptions &options);

// Scores every legal output sequence with the teacher-forced forward pass and
// returns the best. Throws EnumerationError when there are more than `limit`.
DecodeResult exhaustive_decode(const ModelParams &params,
                               const FeatureSequence &x,
                               const SearchOptions &options,
                               std::size_t limit = 1000000);

// Number of sequences exhaustive_decode would score.
double count_sequences(const ModelParams &params, const FeatureSequence &x,
                       const SearchOptions &options);

// Higher score, then fewer tokens, then lexicographically smaller tokens.
bool better(const BeamEntry &a, const BeamEntry &b);

// Rows of comma-separated weights, one per output step.
std::string attention_csv(const Tensor2 &attention);

}  // namespace ntkit

#endif  // NTKIT_DECODER_BEAM_SEARCH_H_
