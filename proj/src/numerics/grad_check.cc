// ntkit/src/numerics/grad_check.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/numerics/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/numerics/tensor.h"

namespace ntkit {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " checked=" << entries.size()
     << " max_rel_error=" << max_rel_error << " worst=" << worst.name
     << " analytic=" << worst.analytic << " numeric=" << worst.numeric;
  return os.str();
}

GradCheckReport grad_check(const LossFn &loss, std::span<const double> params,
                           std::span<const double> analytic,
                           const GradCheckOptions &options,
                           const ParamNameFn &name_of) {
  require_dim(analytic.size(), params.size(), "grad_check analytic gradient");
  auto name = [&](std::size_t i) {
    return name_of ? name_of(i) : "param[" + std::to_string(i) + "]";
  };

  const double base = loss(params);
  if (!std::isfinite(base)) {
    throw Error("grad_check: loss is non-finite at the unperturbed parameters");
  }

  std::vector<std::size_t> indices(params.size());
  std::iota(indices.begin(), indices.end(), 0);
  if (options.samples < indices.size()) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(options.samples);
    std::sort(indices.begin(), indices.end());
  }

  std::vector<double> work(params.begin(), params.end());
  GradCheckReport report;
  for (std::size_t i : indices) {
    const double original = work[i];
    work[i] = original + options.step;
    const double plus = loss(work);
    work[i] = original - options.step;
    const double minus = loss(work);
    work[i] = original;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw Error("grad_check: non-finite loss when perturbing " + name(i));
    }
    GradCheckEntry e;
    e.index = i;
    e.name = name(i);
    e.analytic = analytic[i];
    e.numeric = (plus - minus) / (2.0 * options.step);
    const double denom =
        std::max({std::abs(e.analytic), std::abs(e.numeric), options.floor});
    e.rel_error = std::abs(e.analytic - e.numeric) / denom;
    if (report.entries.empty() || e.rel_error > report.max_rel_error) {
      report.max_rel_error = e.rel_error;
      report.worst = e;
    }
    report.entries.push_back(std::move(e));
  }
  report.passed = report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace ntkit
