// ntkit/src/targets/block_targets.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/targets/block_targets.h"

#include <algorithm>

#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

std::vector<TokenId> BlockTargets::stripped(TokenId epsilon) const {
  std::vector<TokenId> out;
  for (TokenId t : flattened) {
    if (t != epsilon) out.push_back(t);
  }
  return out;
}

std::size_t num_blocks(std::size_t num_frames, std::size_t block_size) {
  if (block_size == 0) throw ConfigError("block size W must be >= 1");
  if (num_frames == 0) throw ConfigError("frame count T must be >= 1");
  return (num_frames + block_size - 1) / block_size;
}

TokenPolicy word_delimiters(const SubwordInventory &inventory) {
  return TokenPolicy{inventory.separator()};
}

std::vector<std::vector<TokenId>> word_tokens(
    const std::vector<std::string> &words, const SubwordInventory &inventory) {
  auto out = encode_words(words, inventory);
  const TokenPolicy policy = word_delimiters(inventory);
  if (policy.separator) {
    for (std::size_t w = 0; w + 1 < out.size(); ++w) {
      out[w].push_back(*policy.separator);
    }
  }
  return out;
}

BlockTargets build_block_targets(
    const WordAlignment &alignment,
    const std::vector<std::vector<TokenId>> &tokens_per_word,
    std::size_t num_frames, std::size_t block_size, std::size_t max_per_block,
    TokenId epsilon, const std::string &utterance_id) {
  validate_alignment(alignment, num_frames, utterance_id);
  if (tokens_per_word.size() != alignment.entries.size()) {
    throw ValidationError("utterance '" + utterance_id + "': " +
                          std::to_string(tokens_per_word.size()) +
                          " token lists for " +
                          std::to_string(alignment.entries.size()) + " words");
  }
  BlockTargets bt;
  bt.W = block_size;
  bt.B = num_blocks(num_frames, block_size);
  bt.per_block.assign(bt.B, {});
  for (std::size_t w = 0; w < tokens_per_word.size(); ++w) {
    const auto &toks = tokens_per_word[w];
    if (toks.empty()) {
      throw ValidationError("utterance '" + utterance_id + "': word '" +
                            alignment.entries[w].word + "' has no tokens");
    }
    auto &block = bt.per_block[alignment.entries[w].end_frame / block_size];
    block.insert(block.end(), toks.begin(), toks.end());
  }
  for (std::size_t b = 0; b < bt.B; ++b) {
    auto &block = bt.per_block[b];
    if (std::find(block.begin(), block.end(), epsilon) != block.end()) {
      throw ValidationError("utterance '" + utterance_id +
                            "': epsilon inside word tokens");
    }
    if (block.size() > max_per_block) {
      throw CapExceededError(utterance_id, b, block.size(), max_per_block);
    }
    block.push_back(epsilon);
    bt.flattened.insert(bt.flattened.end(), block.begin(), block.end());
  }
  return bt;
}

BlockTargets utterance_targets(const Utterance &utt,
                               const SubwordInventory &inventory,
                               std::size_t block_size,
                               std::size_t max_per_block) {
  return build_block_targets(
      utt.alignment, word_tokens(utt.alignment.words(), inventory),
      utt.features.num_frames(), block_size, max_per_block, inventory.epsilon(),
      utt.id());
}

std::size_t max_block_load(const Corpus &corpus,
                           const SubwordInventory &inventory,
                           std::size_t block_size) {
  std::size_t best = 0;
  for (const auto &utt : corpus) {
    const auto bt = build_block_targets(
        utt.alignment, word_tokens(utt.alignment.words(), inventory),
        utt.features.num_frames(), block_size, static_cast<std::size_t>(-1),
        inventory.epsilon(), utt.id());
    for (const auto &block : bt.per_block) {
      best = std::max(best, block.size() - 1);
    }
  }
  return best;
}

std::size_t default_cap(const Corpus &corpus, const SubwordInventory &inventory,
                        std::size_t block_size) {
  return 2 + max_block_load(corpus, inventory, block_size);
}

std::string dump_targets(const BlockTargets &targets,
                         const SubwordInventory &inventory) {
  std::string out;
  for (std::size_t b = 0; b < targets.per_block.size(); ++b) {
    out += "block " + std::to_string(b) + ":";
    for (TokenId t : targets.per_block[b]) {
      out += ' ';
      out += inventory.unit(t);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ntkit
