// ntkit/src/harness/wer.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/harness/wer.h"

#include <algorithm>
#include <limits>

namespace ntkit {

double EditCounts::rate() const {
  if (ref_words == 0) {
    return edits() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(edits()) / static_cast<double>(ref_words);
}

EditCounts &EditCounts::operator+=(const EditCounts &o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_words += o.ref_words;
  return *this;
}

EditCounts align_words(const std::vector<std::string> &ref,
                       const std::vector<std::string> &hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // cost[i][j] with backpointers; ties prefer substitution, then deletion.
  std::vector<std::vector<std::size_t>> cost(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({sub, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }
  }
  EditCounts c;
  c.ref_words = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

double wer(const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
  return align_words(ref, hyp).rate();
}

}  // namespace ntkit
