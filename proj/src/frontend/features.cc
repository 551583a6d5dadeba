// ntkit/src/frontend/features.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/frontend/features.h"

#include <algorithm>

#include "ntkit/error.h"

namespace ntkit {

std::vector<std::string> WordAlignment::words() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto &e : entries) out.push_back(e.word);
  return out;
}

void validate_alignment(const WordAlignment &alignment, std::size_t num_frames,
                        const std::string &utterance_id) {
  auto fail = [&](std::size_t i, const std::string &why) {
    throw ValidationError("utterance '" + utterance_id + "': alignment entry " +
                          std::to_string(i) + " " + why);
  };
  for (std::size_t i = 0; i < alignment.entries.size(); ++i) {
    const auto &e = alignment.entries[i];
    if (e.end_frame < e.start_frame) fail(i, "ends before it starts");
    if (e.end_frame >= num_frames) {
      fail(i, "ends at frame " + std::to_string(e.end_frame) +
                  " beyond T=" + std::to_string(num_frames));
    }
    if (i > 0 && e.start_frame <= alignment.entries[i - 1].end_frame) {
      fail(i, "overlaps or precedes the previous word");
    }
    if (e.word.empty()) fail(i, "has an empty word");
  }
}

FeatureSequence stack_and_downsample(const RawFrames &raw) {
  const std::size_t t_raw = raw.frames.rows;
  if (t_raw == 0) throw ValidationError("empty utterance: no raw frames");
  const std::size_t d = raw.frames.cols;
  const std::size_t t_out = (t_raw + kStackFactor - 1) / kStackFactor;

  FeatureSequence out;
  out.frames = Tensor2(t_out, kStackFactor * d);
  for (std::size_t t = 0; t < t_out; ++t) {
    auto dst = out.frames.row(t);
    const long anchor = static_cast<long>(kStackFactor * t);
    for (std::size_t k = 0; k < kStackFactor; ++k) {
      const long src = std::max(0L, anchor - 2 + static_cast<long>(k));
      const auto row = raw.frames.row(static_cast<std::size_t>(src));
      std::copy(row.begin(), row.end(), dst.begin() + k * d);
    }
  }
  return out;
}

}  // namespace ntkit
