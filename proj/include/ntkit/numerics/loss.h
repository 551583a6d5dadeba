// ntkit/include/ntkit/numerics/loss.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_NUMERICS_LOSS_H_
#define NTKIT_NUMERICS_LOSS_H_

#include <cstddef>
#include <span>

#include "ntkit/numerics/tensor.h"

namespace ntkit {

struct SoftmaxXent {
  double loss = 0.0;
  Vec grad;  // softmax(logits) - onehot(target)
};

// Max-subtracted log-softmax.
Vec log_softmax(std::span<const double> logits);

SoftmaxXent softmax_xent(std::span<const double> logits, std::size_t target);

}  // namespace ntkit

#endif  // NTKIT_NUMERICS_LOSS_H_
