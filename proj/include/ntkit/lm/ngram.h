// ntkit/include/ntkit/lm/ngram.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_LM_NGRAM_H_
#define NTKIT_LM_NGRAM_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ntkit/tokenizer/inventory.h"

namespace ntkit {

// Witten-Bell n-gram model over token ids 0..vocab_size-1, stored in backoff
// form. Histories are left-padded with <sos>; the base level interpolates with
// a uniform distribution so every token has nonzero probability.
class NGramLM {
 public:
  using Context = std::vector<TokenId>;

  struct Entry {
    std::map<TokenId, double> log_probs;  // seen successors
    double log_backoff = 0.0;
    bool operator==(const Entry &) const = default;
  };

  NGramLM() = default;
  NGramLM(std::size_t order, std::size_t vocab_size)
      : order_(order), vocab_size_(vocab_size) {}

  std::size_t order() const { return order_; }
  std::size_t vocab_size() const { return vocab_size_; }
  const std::map<Context, Entry> &contexts() const { return contexts_; }
  std::map<Context, Entry> &mutable_contexts() { return contexts_; }

  // log p(next | history); only the last order-1 history tokens matter.
  double log_prob(const std::vector<TokenId> &history, TokenId next) const;
  // Backoff chain starting at exactly `ctx` (no padding).
  double context_log_prob(Context ctx, TokenId next) const;

  // Text format, natural log. Header lines "\data\", order=<n>, vocab=<V>,
  // backoff0=<empty-context backoff> and "ngram <k>=<count>" for k = 1..n;
  // then per order a "\<k>-grams:" line followed by
  // <logprob> TAB <space-separated ids> TAB <backoff> lines; then "\end\".
  // Context-only entries (histories never seen as events) use logprob -inf.
  std::string serialize() const;
  static NGramLM parse(const std::string &text);
  void save(const std::string &path) const;
  static NGramLM load(const std::string &path);

  bool operator==(const NGramLM &) const = default;

 private:
  std::size_t order_ = 0;
  std::size_t vocab_size_ = 0;
  std::map<Context, Entry> contexts_;
};

// Throws ConfigError for order 0 or an empty corpus, LabelError for ids
// outside the vocabulary.
NGramLM train_ngram(const std::vector<std::vector<TokenId>> &sequences,
                    std::size_t order, std::size_t vocab_size);

double lm_logprob(const NGramLM &lm, const std::vector<TokenId> &history,
                  TokenId next);

struct FusionWeights {
  double lambda = 0.0;  // LM weight
  double eta = 0.0;     // coverage weight
  double beta = 0.5;    // coverage attention threshold

  // Throws ConfigError unless lambda, eta >= 0 and 0 < beta < 1.
  void validate() const;
};

// model_lp + lambda * lm_lp + eta * coverage.
double fused_score(double model_lp, double lm_lp, double coverage,
                   const FusionWeights &w);

}  // namespace ntkit

#endif  // NTKIT_LM_NGRAM_H_
