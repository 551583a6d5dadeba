// ntkit/include/ntkit/frontend/corpus.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_FRONTEND_CORPUS_H_
#define NTKIT_FRONTEND_CORPUS_H_

#include <string>
#include <vector>

#include "ntkit/frontend/features.h"

namespace ntkit {

struct Utterance {
  FeatureSequence features;
  WordAlignment alignment;
  std::string transcript;

  const std::string &id() const { return features.utterance_id; }
  bool operator==(const Utterance &) const = default;
};

using Corpus = std::vector<Utterance>;

// JSON-lines corpus: one object per line with `id`, `transcript`, `frames`
// (array of 30ms frame vectors) and `alignment` (array of [word, start, end]).
// Throws ParseError with the 1-based line number on malformed records and
// ValidationError naming the utterance when an alignment is inconsistent.
Corpus load_corpus(const std::string &path);
Corpus parse_corpus(const std::string &text);

void save_corpus(const Corpus &corpus, const std::string &path);
std::string serialize_utterance(const Utterance &utt);

// Hash over the serialized corpus, for report provenance.
std::string corpus_hash(const Corpus &corpus);

}  // namespace ntkit

#endif  // NTKIT_FRONTEND_CORPUS_H_
