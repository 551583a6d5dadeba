// ntkit/tests/unit/reference.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_TESTS_UNIT_REFERENCE_H_
#define NTKIT_TESTS_UNIT_REFERENCE_H_

#include <cmath>
#include <vector>

#include "ntkit/numerics/attention.h"
#include "ntkit/numerics/lstm.h"

namespace ntkit::reference {

// ---------------------------------------------------------------------------
// Scalar reference implementations. Deliberately written as plain loops over
// the textbook formulas, without the helpers used by the library.

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void lstm(const LstmLayer &l, const std::vector<double> &x,
              const std::vector<double> &h, const std::vector<double> &c,
              std::vector<double> &h_out, std::vector<double> &c_out) {
  const std::size_t H = h.size();
  h_out.assign(H, 0.0);
  c_out.assign(H, 0.0);
  for (std::size_t j = 0; j < H; ++j) {
    double z[4];
    for (int g = 0; g < 4; ++g) {
      const std::size_t r = g * H + j;
      double s = l.bias.data[r];
      for (std::size_t k = 0; k < x.size(); ++k) s += l.wx(r, k) * x[k];
      for (std::size_t k = 0; k < H; ++k) s += l.wh(r, k) * h[k];
      z[g] = s;
    }
    const double ig = sigmoid(z[0]);
    const double fg = sigmoid(z[1]);
    const double cand = std::tanh(z[2]);
    const double og = sigmoid(z[3]);
    c_out[j] = fg * c[j] + ig * cand;
    h_out[j] = og * std::tanh(c_out[j]);
  }
}

// Per-head additive attention written from the definition.
inline void attention(const AttentionParams &p, const std::vector<double> &q,
                   const Tensor2 &keys, const Tensor2 &values,
                   std::size_t heads, std::vector<std::vector<double>> &w_out,
                   std::vector<double> &ctx) {
  const std::size_t A = p.v.rows;
  const std::size_t ah = A / heads;
  const std::size_t eh = values.cols / heads;
  w_out.assign(heads, std::vector<double>(keys.rows));
  ctx.assign(values.cols, 0.0);
  for (std::size_t h = 0; h < heads; ++h) {
    std::vector<double> e(keys.rows);
    for (std::size_t i = 0; i < keys.rows; ++i) {
      double s = 0.0;
      for (std::size_t a = h * ah; a < (h + 1) * ah; ++a) {
        double pre = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) pre += p.wq(a, k) * q[k];
        for (std::size_t k = 0; k < keys.cols; ++k) pre += p.wk(a, k) * keys(i, k);
        s += p.v.data[a] * std::tanh(pre);
      }
      e[i] = s;
    }
    double z = 0.0;
    for (double s : e) z += std::exp(s);
    for (std::size_t i = 0; i < keys.rows; ++i) {
      w_out[h][i] = std::exp(e[i]) / z;
      for (std::size_t c = h * eh; c < (h + 1) * eh; ++c) {
        ctx[c] += w_out[h][i] * values(i, c);
      }
    }
  }
}

}  // namespace ntkit::reference

#endif  // NTKIT_TESTS_UNIT_REFERENCE_H_
