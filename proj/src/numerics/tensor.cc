// ntkit/src/numerics/tensor.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/numerics/tensor.h"

#include <cmath>

#include "ntkit/error.h"

namespace ntkit {

void require_dim(std::size_t a, std::size_t b, const std::string &what) {
  if (a != b) {
    throw ShapeError("shape mismatch for " + what + ": got " +
                     std::to_string(a) + ", expected " + std::to_string(b));
  }
}

void matvec_acc(const Tensor2 &a, std::span<const double> x,
                std::span<double> y) {
  matvec_acc_cols(a, 0, x, y);
}

void matvec_acc_cols(const Tensor2 &a, std::size_t col_begin,
                     std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double *w = a.data.data() + r * a.cols + col_begin;
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t c = 0;
    for (; c + 4 <= n; c += 4) {
      acc[0] += w[c] * x[c];
      acc[1] += w[c + 1] * x[c + 1];
      acc[2] += w[c + 2] * x[c + 2];
      acc[3] += w[c + 3] * x[c + 3];
    }
    for (; c < n; ++c) acc[0] += w[c] * x[c];
    y[r] += (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
}

void matvec_t_acc(const Tensor2 &a, std::span<const double> y_grad,
                  std::span<double> x_grad) {
  matvec_t_acc_cols(a, 0, y_grad, x_grad);
}

void matvec_t_acc_cols(const Tensor2 &a, std::size_t col_begin,
                       std::span<const double> y_grad,
                       std::span<double> x_grad) {
  const std::size_t n = x_grad.size();
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double g = y_grad[r];
    if (g == 0.0) continue;
    const double *w = a.data.data() + r * a.cols + col_begin;
    for (std::size_t c = 0; c < n; ++c) x_grad[c] += w[c] * g;
  }
}

void outer_acc(std::span<const double> y, std::span<const double> x,
               std::size_t col_begin, Tensor2 &g) {
  const std::size_t n = x.size();
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    double *out = g.data.data() + r * g.cols + col_begin;
    for (std::size_t c = 0; c < n; ++c) out[c] += yr * x[c];
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void fill_uniform(Tensor2 &t, double scale, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double &v : t.data) v = dist(rng);
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace ntkit
