// ntkit/src/numerics/loss.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/numerics/loss.h"

#include <algorithm>
#include <cmath>

#include "ntkit/error.h"

namespace ntkit {

Vec log_softmax(std::span<const double> logits) {
  double max_logit = -INFINITY;
  for (double l : logits) max_logit = std::max(max_logit, l);
  double z = 0.0;
  for (double l : logits) z += std::exp(l - max_logit);
  const double log_z = max_logit + std::log(z);
  Vec out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

SoftmaxXent softmax_xent(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw LabelError("target label " + std::to_string(target) +
                     " out of range for " + std::to_string(logits.size()) +
                     " classes");
  }
  SoftmaxXent out;
  out.grad = log_softmax(logits);
  out.loss = -out.grad[target];
  for (double &g : out.grad) g = std::exp(g);
  out.grad[target] -= 1.0;
  return out;
}

}  // namespace ntkit
