// ntkit/include/ntkit/frontend/synth.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_FRONTEND_SYNTH_H_
#define NTKIT_FRONTEND_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ntkit/frontend/corpus.h"

namespace ntkit {

// Synthetic "acoustics": every character has a fixed random pattern of
// raw_dim values; a word is its characters' patterns, each held for
// frames_per_char 30ms frames; words are separated by gap_frames of silence
// and trailing_frames of silence follow the last word.
struct SynthLexicon {
  std::vector<std::string> words;
  std::size_t raw_dim = 8;
  std::size_t frames_per_char = 2;
  std::size_t gap_frames = 1;
  std::size_t trailing_frames = 0;
  std::uint64_t pattern_seed = 1234;

  bool contains(const std::string &word) const;
  Vec char_pattern(const std::string &ch) const;

  // A fixed word list over ten letters with many shared prefixes
  // ("go"/"good"/"goat", "ten"/"tent", ...), so word ends are ambiguous until
  // the following frames are seen.
  static SynthLexicon standard();
};

// Pure function of (words, lexicon, noise_level, seed). Throws LexiconError
// for words outside the lexicon.
Utterance synth_utterance(const std::vector<std::string> &words,
                          const SynthLexicon &lexicon, double noise_level,
                          std::uint64_t seed,
                          const std::string &utterance_id = "");

struct SynthCorpusOptions {
  std::size_t num_utterances = 500;
  std::size_t min_words = 2;
  std::size_t max_words = 4;
  double noise = 0.1;
  std::uint64_t seed = 42;
  std::string id_prefix = "utt";
  // Overrides the lexicon's trailing silence. Without it the last word's end
  // is only visible to a streaming model when the utterance stops.
  std::size_t trailing_frames = 3;
};

Corpus synth_corpus(const SynthLexicon &lexicon,
                    const SynthCorpusOptions &options);

}  // namespace ntkit

#endif  // NTKIT_FRONTEND_SYNTH_H_
