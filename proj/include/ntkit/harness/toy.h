// ntkit/include/ntkit/harness/toy.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_HARNESS_TOY_H_
#define NTKIT_HARNESS_TOY_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ntkit/models/model.h"
#include "ntkit/numerics/grad_check.h"
#include "ntkit/targets/block_targets.h"

namespace ntkit {

// Random model, features and targets for gradient checks: 2x16 encoder,
// 2x16 decoder, 12 output classes, 11 frames of width 6.
struct ToyProblem {
  ModelParams params;
  FeatureSequence x;
  WindowSpec window{4, 1, 2};
  BlockTargets blocks;
  std::vector<TokenId> las_targets;  // blocks without epsilon, plus <eos>
};

ToyProblem make_toy_problem(std::uint64_t seed, std::size_t heads = 1);

// Analytic gradients of the toy loss against central differences.
GradCheckReport model_grad_check(ModelMode mode, const ToyProblem &toy,
                                 const GradCheckOptions &options);

}  // namespace ntkit

#endif  // NTKIT_HARNESS_TOY_H_
