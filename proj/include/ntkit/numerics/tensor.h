// ntkit/include/ntkit/numerics/tensor.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_NUMERICS_TENSOR_H_
#define NTKIT_NUMERICS_TENSOR_H_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ntkit {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. Vectors that are parameters (biases,
// attention v) are stored as n x 1 tensors so every parameter shares one type.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool operator==(const Tensor2 &o) const = default;
};

// Throws ShapeError naming `what` unless a == b.
void require_dim(std::size_t a, std::size_t b, const std::string &what);

// y += A x
void matvec_acc(const Tensor2 &a, std::span<const double> x, std::span<double> y);
// y += A[:, col_begin : col_begin + x.size()] x
void matvec_acc_cols(const Tensor2 &a, std::size_t col_begin,
                     std::span<const double> x, std::span<double> y);
// x_grad += A^T y_grad
void matvec_t_acc(const Tensor2 &a, std::span<const double> y_grad,
                  std::span<double> x_grad);
// x_grad += A[:, col_begin : col_begin + x_grad.size()]^T y_grad
void matvec_t_acc_cols(const Tensor2 &a, std::size_t col_begin,
                       std::span<const double> y_grad, std::span<double> x_grad);
// G[:, col_begin : col_begin + x.size()] += y x^T
void outer_acc(std::span<const double> y, std::span<const double> x,
               std::size_t col_begin, Tensor2 &g);

double sigmoid(double x);

// Fills with U[-scale, scale] draws from `rng`.
void fill_uniform(Tensor2 &t, double scale, std::mt19937_64 &rng);

bool all_finite(std::span<const double> values);

}  // namespace ntkit

#endif  // NTKIT_NUMERICS_TENSOR_H_
