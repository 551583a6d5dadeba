// ntkit/src/numerics/adam.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/numerics/adam.h"

#include <cmath>

#include "ntkit/error.h"

namespace ntkit {

void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamState &state) {
  require_dim(grads.size(), params.size(), "adam grads");
  require_dim(state.m.size(), params.size(), "adam first moment");
  require_dim(state.v.size(), params.size(), "adam second moment");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (g == 0.0 && state.m[i] == 0.0 && state.v[i] == 0.0) continue;
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace ntkit
