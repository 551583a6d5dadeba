// ntkit/include/ntkit/numerics/adam.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_NUMERICS_ADAM_H_
#define NTKIT_NUMERICS_ADAM_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "ntkit/numerics/tensor.h"

namespace ntkit {

struct AdamState {
  std::uint64_t step = 0;
  Vec m;
  Vec v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t num_params, double learning_rate)
      : m(num_params, 0.0), v(num_params, 0.0), lr(learning_rate) {}
};

// Bias-corrected Adam step over a flat parameter vector.
void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamState &state);

}  // namespace ntkit

#endif  // NTKIT_NUMERICS_ADAM_H_
