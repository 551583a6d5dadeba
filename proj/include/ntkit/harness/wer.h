// ntkit/include/ntkit/harness/wer.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_HARNESS_WER_H_
#define NTKIT_HARNESS_WER_H_

#include <cstddef>
#include <string>
#include <vector>

namespace ntkit {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;

  std::size_t edits() const { return substitutions + deletions + insertions; }
  // edits / ref_words; +inf when the reference is empty but edits > 0.
  double rate() const;
  EditCounts &operator+=(const EditCounts &o);
};

// Levenshtein alignment of word sequences, minimizing total edits.
EditCounts align_words(const std::vector<std::string> &ref,
                       const std::vector<std::string> &hyp);

double wer(const std::vector<std::string> &ref, const std::vector<std::string> &hyp);

}  // namespace ntkit

#endif  // NTKIT_HARNESS_WER_H_
