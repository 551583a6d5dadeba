// ntkit/src/harness/toy.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/harness/toy.h"

#include <random>

namespace ntkit {

ToyProblem make_toy_problem(std::uint64_t seed, std::size_t heads) {
  constexpr std::size_t kFrames = 11, kDim = 6, kVocab = 12;
  ModelConfig c;
  c.input_dim = kDim;
  c.encoder_width = 16;
  c.decoder_width = 16;
  c.embed_dim = 8;
  c.heads = heads;
  c.vocab_size = kVocab;
  ToyProblem toy{ModelParams(c), {}, {4, 1, 2}, {}, {}};
  std::mt19937_64 rng(seed);
  // Larger than the training init so that gradients are not all tiny.
  toy.params.for_each_tensor(
      [&](const std::string &, Tensor2 &t) { fill_uniform(t, 0.3, rng); });

  std::normal_distribution<double> n(0.0, 1.0);
  toy.x.frames = Tensor2(kFrames, kDim);
  for (double &v : toy.x.frames.data) v = n(rng);
  toy.x.utterance_id = "toy";

  WordAlignment a;
  std::vector<std::vector<TokenId>> tokens;
  for (std::size_t t = 0; t < kFrames;) {
    const std::size_t len = 1 + rng() % 4;
    if (t + len > kFrames) break;
    a.entries.push_back({"w", t, t + len - 1});
    std::vector<TokenId> w(1 + rng() % 3);
    for (auto &k : w) k = 4 + static_cast<TokenId>(rng() % (kVocab - 4));
    tokens.push_back(w);
    t += len + rng() % 3;
  }
  toy.blocks = build_block_targets(a, tokens, kFrames, toy.window.W, 100,
                                   SubwordInventory::kEpsilon, "toy");
  toy.las_targets = toy.blocks.stripped(SubwordInventory::kEpsilon);
  toy.las_targets.push_back(SubwordInventory::kEos);
  return toy;
}

GradCheckReport model_grad_check(ModelMode mode, const ToyProblem &toy,
                                 const GradCheckOptions &options) {
  const bool nt = mode == ModelMode::kNt;
  const GradientResult g = nt ? nt_gradients(toy.params, toy.x, toy.blocks, toy.window)
                              : las_gradients(toy.params, toy.x, toy.las_targets);
  ModelParams probe = toy.params;
  auto loss = [&](std::span<const double> flat) {
    probe.unflatten(flat);
    return nt ? nt_forward(probe, toy.x, toy.blocks, toy.window).loss
              : las_forward(probe, toy.x, toy.las_targets).loss;
  };
  return grad_check(loss, toy.params.flatten(), g.grads.flatten(), options,
                    [&](std::size_t i) { return toy.params.param_name(i); });
}

}  // namespace ntkit
