// ntkit/include/ntkit/models/checkpoint.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_MODELS_CHECKPOINT_H_
#define NTKIT_MODELS_CHECKPOINT_H_

#include <string>

#include "ntkit/models/model.h"
#include "ntkit/tokenizer/inventory.h"

namespace ntkit {

// File layout:
//   ntkit-ckpt v1
//   mode <las|nt>
//   window W=<n> k=<n> lookahead=<n>
//   shapes <ModelConfig::to_string()>
//   inventory <hash>
//   limits M=<n> max_len=<n>         (decode caps fixed at training time)
//   tensor <name> <rows> <cols>      (one per tensor, for_each_tensor order)
//   data <count>
// followed by `count` little-endian IEEE-754 doubles in the same order.
struct Checkpoint {
  ModelMode mode = ModelMode::kNt;
  WindowSpec window;
  std::string inventory_hash;
  std::size_t max_per_block = 0;
  std::size_t max_len = 0;
  ModelParams params;

  bool operator==(const Checkpoint &) const = default;
};

std::string serialize_checkpoint(const Checkpoint &ckpt);
// Throws ParseError on a malformed header and ShapeError when the tensors do
// not match the recorded shapes.
Checkpoint parse_checkpoint(const std::string &bytes);

void save_checkpoint(const Checkpoint &ckpt, const std::string &path);
Checkpoint load_checkpoint(const std::string &path);

// Throws ValidationError unless the checkpoint was trained with `inventory`.
void check_inventory(const Checkpoint &ckpt, const SubwordInventory &inventory);

}  // namespace ntkit

#endif  // NTKIT_MODELS_CHECKPOINT_H_
