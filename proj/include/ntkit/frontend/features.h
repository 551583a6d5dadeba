// ntkit/include/ntkit/frontend/features.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_FRONTEND_FEATURES_H_
#define NTKIT_FRONTEND_FEATURES_H_

#include <cstddef>
#include <string>
#include <vector>

#include "ntkit/numerics/tensor.h"

namespace ntkit {

inline constexpr int kRawFrameShiftMs = 10;
inline constexpr int kFrameShiftMs = 30;
inline constexpr std::size_t kStackFactor = 3;

struct RawFrames {
  Tensor2 frames;  // T_raw x D_raw
  int frame_shift_ms = kRawFrameShiftMs;
};

// 30ms-rate encoder input x_1..x_T.
struct FeatureSequence {
  Tensor2 frames;  // T x (3 * D_raw)
  int frame_shift_ms = kFrameShiftMs;
  std::string utterance_id;

  std::size_t num_frames() const { return frames.rows; }
  std::size_t dim() const { return frames.cols; }

  bool operator==(const FeatureSequence &) const = default;
};

struct AlignedWord {
  std::string word;
  std::size_t start_frame = 0;  // inclusive, 30ms frames
  std::size_t end_frame = 0;    // inclusive

  bool operator==(const AlignedWord &) const = default;
};

struct WordAlignment {
  std::vector<AlignedWord> entries;

  std::vector<std::string> words() const;
  bool operator==(const WordAlignment &) const = default;
};

// Throws ValidationError (mentioning `utterance_id`) unless the entries are
// sorted, non-overlapping, have end >= start and end within [0, T).
void validate_alignment(const WordAlignment &alignment, std::size_t num_frames,
                        const std::string &utterance_id);

// Stacks each raw frame with the two to its left and keeps every third stack:
// output frame t covers raw frames 3t-2, 3t-1, 3t, where negative indices
// repeat raw frame 0. Output has ceil(T_raw / 3) frames.
FeatureSequence stack_and_downsample(const RawFrames &raw);

}  // namespace ntkit

#endif  // NTKIT_FRONTEND_FEATURES_H_
