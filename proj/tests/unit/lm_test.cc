// ntkit/tests/unit/lm_test.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ntkit/error.h"
#include "ntkit/lm/ngram.h"

namespace ntkit {
namespace {

constexpr TokenId a = 4, b = 5;

TEST(TrainNgram, UnigramHandCounted) {
  // c(a)=2, c(b)=1, N=3, 2 types, V=2: p(w) = (c(w) + 2 * 1/2) / (3 + 2)
  auto lm = train_ngram({{0, 0, 1}}, 1, 2);
  EXPECT_NEAR(std::exp(lm_logprob(lm, {}, 0)), 3.0 / 5.0, 1e-15);
  EXPECT_NEAR(std::exp(lm_logprob(lm, {}, 1)), 2.0 / 5.0, 1e-15);
}

TEST(TrainNgram, BigramHandCounted) {
  auto lm = train_ngram({{a, a, b}}, 2, 6);
  // Unigram level: (c + 2/6) / 5.
  EXPECT_NEAR(std::exp(lm_logprob(lm, {b}, a)), 7.0 / 15.0, 1e-15);
  EXPECT_NEAR(std::exp(lm_logprob(lm, {b}, 3)), 1.0 / 15.0, 1e-15);
  // Padded start: one event, one type.
  EXPECT_NEAR(std::exp(lm_logprob(lm, {}, a)), 11.0 / 15.0, 1e-15);
  // After "a": two events, two types.
  EXPECT_NEAR(std::exp(lm_logprob(lm, {a}, a)), 29.0 / 60.0, 1e-15);
  EXPECT_NEAR(std::exp(lm_logprob(lm, {a}, b)), 23.0 / 60.0, 1e-15);
  EXPECT_NEAR(std::exp(lm_logprob(lm, {a}, 2)), 1.0 / 30.0, 1e-15);
}

TEST(TrainNgram, UnseenBigramBacksOff) {
  auto lm = train_ngram({{a, a, b}}, 2, 6);
  const double bow = lm.contexts().at({a}).log_backoff;
  EXPECT_NEAR(lm_logprob(lm, {a}, 3), bow + lm_logprob(lm, {b}, 3), 1e-15);
}

std::vector<std::vector<TokenId>> synth_sequences(std::size_t n, std::size_t V, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<TokenId>> out(n);
  for (auto &s : out) {
    s.resize(1 + rng() % 12);
    for (auto &t : s) t = 4 + static_cast<TokenId>(rng() % (rng() % 2 ? 3 : V - 4));
  }
  return out;
}

TEST(TrainNgram, NormalizedForSampledContexts) {
  const std::size_t V = 20;
  auto lm = train_ngram(synth_sequences(200, V, 1), 3, V);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    std::vector<TokenId> h(rng() % 4);
    for (auto &t : h) t = 4 + static_cast<TokenId>(rng() % (i % 2 ? 3 : V - 4));
    double s = 0.0;
    for (TokenId w = 0; w < static_cast<TokenId>(V); ++w) {
      const double lp = lm_logprob(lm, h, w);
      EXPECT_LE(lp, 0.0);
      s += std::exp(lp);
    }
    EXPECT_NEAR(s, 1.0, 1e-9) << "context " << i;
  }
}

TEST(TrainNgram, Errors) {
  EXPECT_THROW(train_ngram({}, 2, 5), ConfigError);
  EXPECT_THROW(train_ngram({{}}, 2, 5), ConfigError);
  EXPECT_THROW(train_ngram({{1}}, 0, 5), ConfigError);
  EXPECT_THROW(train_ngram({{9}}, 2, 5), LabelError);
  auto lm = train_ngram({{1}}, 1, 5);
  EXPECT_THROW(lm_logprob(lm, {}, 5), LabelError);
}

TEST(TrainNgram, Deterministic) {
  const auto seqs = synth_sequences(100, 15, 3);
  EXPECT_EQ(train_ngram(seqs, 3, 15).serialize(), train_ngram(seqs, 3, 15).serialize());
}

TEST(LmFile, RoundTrip) {
  const std::size_t V = 15;
  auto lm = train_ngram(synth_sequences(150, V, 4), 3, V);
  const std::string text = lm.serialize();
  EXPECT_EQ(text.rfind("\\data\\\norder=3\nvocab=15\n", 0), 0u);
  const NGramLM back = NGramLM::parse(text);
  EXPECT_EQ(back, lm);
  EXPECT_EQ(back.serialize(), text);
}

TEST(LmFile, RejectsMalformed) {
  EXPECT_THROW(NGramLM::parse(""), ParseError);
  EXPECT_THROW(NGramLM::parse("\\data\\\norder=x\n"), ParseError);
  auto text = train_ngram({{a, b}}, 2, 6).serialize();
  auto bad = text;
  bad.replace(bad.find("\\end\\"), 5, "oops");
  EXPECT_THROW(NGramLM::parse(bad), ParseError);
  bad = text;
  bad.replace(bad.find("\t4\t"), 3, "\t9\t");
  EXPECT_THROW(NGramLM::parse(bad), ParseError);
}

TEST(FusedScore, Arithmetic) {
  FusionWeights w;
  EXPECT_EQ(fused_score(-1.25, -7.0, 3.0, w), -1.25);
  w.lambda = 1.0;
  EXPECT_EQ(fused_score(-2.0, -3.0, 0.0, w), -5.0);
  w.eta = 0.5;
  EXPECT_EQ(fused_score(-2.0, -3.0, 4.0, w), -3.0);
  EXPECT_NO_THROW(w.validate());
  w.beta = 1.0;
  EXPECT_THROW(w.validate(), ConfigError);
  w.beta = 0.5;
  w.lambda = -0.1;
  EXPECT_THROW(w.validate(), ConfigError);
}

}  // namespace
}  // namespace ntkit
