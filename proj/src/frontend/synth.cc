// ntkit/src/frontend/synth.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/frontend/synth.h"

#include <algorithm>
#include <random>

#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

bool SynthLexicon::contains(const std::string &word) const {
  return std::find(words.begin(), words.end(), word) != words.end();
}

Vec SynthLexicon::char_pattern(const std::string &ch) const {
  std::mt19937_64 rng(splitmix64(pattern_seed ^ fnv1a64(ch)));
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec p(raw_dim);
  for (double &v : p) v = dist(rng);
  return p;
}

SynthLexicon SynthLexicon::standard() {
  SynthLexicon lex;
  lex.words = {"go",   "gone", "good", "goat", "to",   "tom",  "tomb",
               "ten",  "tent", "net",  "nets", "note", "one",  "on",
               "do",   "dog",  "dot",  "dots", "and",  "an",   "ant",
               "man",  "mane", "mat",  "team", "tea",  "eat",  "seat",
               "sea",  "see",  "seed", "need", "den",  "end",  "send",
               "sent", "toe",  "dome", "mode", "demo", "name", "same",
               "some", "son",  "song", "bat",  "bag",  "bog"};
  return lex;
}

Utterance synth_utterance(const std::vector<std::string> &words,
                          const SynthLexicon &lexicon, double noise_level,
                          std::uint64_t seed,
                          const std::string &utterance_id) {
  if (words.empty()) throw LexiconError("synth_utterance: no words");
  Utterance utt;
  std::vector<Vec> frames;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string &word = words[w];
    if (!lexicon.contains(word)) {
      throw LexiconError("word '" + word + "' is not in the lexicon");
    }
    if (w > 0) {
      for (std::size_t g = 0; g < lexicon.gap_frames; ++g) {
        frames.emplace_back(lexicon.raw_dim, 0.0);
      }
    }
    AlignedWord aligned;
    aligned.word = word;
    aligned.start_frame = frames.size();
    for (const std::string &ch : split_utf8(word)) {
      const Vec pattern = lexicon.char_pattern(ch);
      for (std::size_t k = 0; k < lexicon.frames_per_char; ++k) {
        frames.push_back(pattern);
      }
    }
    aligned.end_frame = frames.size() - 1;
    utt.alignment.entries.push_back(aligned);
  }
  for (std::size_t g = 0; g < lexicon.trailing_frames; ++g) {
    frames.emplace_back(lexicon.raw_dim, 0.0);
  }

  // Each 30ms frame becomes three 10ms frames with independent noise, which
  // the stacking frontend folds back to the 30ms rate.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  RawFrames raw;
  raw.frames = Tensor2(frames.size() * kStackFactor, lexicon.raw_dim);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t k = 0; k < kStackFactor; ++k) {
      auto row = raw.frames.row(t * kStackFactor + k);
      for (std::size_t d = 0; d < lexicon.raw_dim; ++d) {
        row[d] = frames[t][d];
        if (noise_level > 0.0) row[d] += noise_level * noise(rng);
      }
    }
  }
  utt.features = stack_and_downsample(raw);
  utt.features.utterance_id = utterance_id;
  utt.transcript = join(words, " ");
  return utt;
}

Corpus synth_corpus(const SynthLexicon &lexicon,
                    const SynthCorpusOptions &options) {
  if (lexicon.words.empty()) throw LexiconError("empty lexicon");
  if (options.min_words == 0 || options.max_words < options.min_words) {
    throw ConfigError("synth_corpus: need 1 <= min_words <= max_words");
  }
  SynthLexicon lex = lexicon;
  lex.trailing_frames = options.trailing_frames;
  const std::size_t n_words = lex.words.size();
  std::mt19937_64 rng(splitmix64(options.seed));

  // A sparse word-bigram "grammar": each word prefers four successors, so the
  // text side carries structure an n-gram model can pick up.
  std::vector<std::vector<std::size_t>> successors(n_words);
  for (auto &s : successors) {
    for (int k = 0; k < 4; ++k) s.push_back(rng() % n_words);
  }

  Corpus corpus;
  corpus.reserve(options.num_utterances);
  for (std::size_t u = 0; u < options.num_utterances; ++u) {
    const std::size_t len =
        options.min_words + rng() % (options.max_words - options.min_words + 1);
    std::vector<std::string> words;
    std::size_t cur = rng() % n_words;
    words.push_back(lexicon.words[cur]);
    while (words.size() < len) {
      const bool follow = (rng() % 10) < 7;
      cur = follow ? successors[cur][rng() % 4] : rng() % n_words;
      words.push_back(lex.words[cur]);
    }
    char id[32];
    std::snprintf(id, sizeof(id), "%05zu", u);
    corpus.push_back(synth_utterance(words, lex, options.noise,
                                     splitmix64(options.seed * 1000003ULL + u),
                                     options.id_prefix + "-" + id));
  }
  return corpus;
}

}  // namespace ntkit
