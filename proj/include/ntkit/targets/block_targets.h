// ntkit/include/ntkit/targets/block_targets.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_TARGETS_BLOCK_TARGETS_H_
#define NTKIT_TARGETS_BLOCK_TARGETS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ntkit/frontend/corpus.h"
#include "ntkit/frontend/features.h"
#include "ntkit/tokenizer/inventory.h"

namespace ntkit {

struct BlockTargets {
  std::size_t W = 0;
  std::size_t B = 0;
  // Each list ends with exactly one epsilon.
  std::vector<std::vector<TokenId>> per_block;
  std::vector<TokenId> flattened;

  // Non-epsilon tokens, in order.
  std::vector<TokenId> stripped(TokenId epsilon) const;
  bool operator==(const BlockTargets &) const = default;
};

// ceil(T / W). ConfigError when W == 0 or T == 0.
std::size_t num_blocks(std::size_t num_frames, std::size_t block_size);

// How words are delimited in the token stream.
struct TokenPolicy {
  // Grapheme mode: appended to every word but the last, so it is emitted in
  // the block of the word it follows.
  std::optional<TokenId> separator;
};

TokenPolicy word_delimiters(const SubwordInventory &inventory);

// Per-word token lists with the policy's separators attached.
std::vector<std::vector<TokenId>> word_tokens(
    const std::vector<std::string> &words, const SubwordInventory &inventory);

// Word w's tokens go to block floor(end_frame(w) / W); every block then gets a
// trailing epsilon. Throws CapExceededError if any block has more than
// `max_per_block` non-epsilon tokens.
BlockTargets build_block_targets(
    const WordAlignment &alignment,
    const std::vector<std::vector<TokenId>> &tokens_per_word,
    std::size_t num_frames, std::size_t block_size, std::size_t max_per_block,
    TokenId epsilon, const std::string &utterance_id = "");

BlockTargets utterance_targets(const Utterance &utt,
                               const SubwordInventory &inventory,
                               std::size_t block_size,
                               std::size_t max_per_block);

// Largest per-block non-epsilon count over the corpus at this W.
std::size_t max_block_load(const Corpus &corpus,
                           const SubwordInventory &inventory,
                           std::size_t block_size);

// 2 + max_block_load.
std::size_t default_cap(const Corpus &corpus, const SubwordInventory &inventory,
                        std::size_t block_size);

// One line per block: "block <b>: unit unit ... <eps>".
std::string dump_targets(const BlockTargets &targets,
                         const SubwordInventory &inventory);

}  // namespace ntkit

#endif  // NTKIT_TARGETS_BLOCK_TARGETS_H_
