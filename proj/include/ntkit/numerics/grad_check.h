// ntkit/include/ntkit/numerics/grad_check.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_NUMERICS_GRAD_CHECK_H_
#define NTKIT_NUMERICS_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ntkit {

struct GradCheckOptions {
  std::size_t samples = 64;  // parameters checked; all of them if >= size
  double step = 1e-4;        // central-difference half-width
  double tolerance = 1e-4;   // max allowed relative error
  // Denominator floor of the relative error, so that parameters whose true
  // gradient is ~0 are judged on absolute error instead.
  double floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::size_t index = 0;
  std::string name;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  GradCheckEntry worst;
  bool passed = false;

  std::string summary() const;
};

using LossFn = std::function<double(std::span<const double>)>;
using ParamNameFn = std::function<std::string(std::size_t)>;

// Compares `analytic` against central differences of `loss` around `params`
// on a seeded sample of coordinates. Throws ntkit::Error naming the perturbed
// parameter if the loss is non-finite.
GradCheckReport grad_check(const LossFn &loss, std::span<const double> params,
                           std::span<const double> analytic,
                           const GradCheckOptions &options,
                           const ParamNameFn &name_of = {});

}  // namespace ntkit

#endif  // NTKIT_NUMERICS_GRAD_CHECK_H_
