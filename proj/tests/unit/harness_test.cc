// ntkit/tests/unit/harness_test.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "ntkit/error.h"
#include "ntkit/frontend/synth.h"
#include "ntkit/harness/config.h"
#include "ntkit/harness/recipe.h"
#include "ntkit/harness/trainer.h"
#include "ntkit/harness/wer.h"
#include "ntkit/text.h"

namespace ntkit {
namespace {

// Textbook distance table, no backtrace.
std::size_t levenshtein(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

TEST(Wer, Examples) {
  EXPECT_EQ(wer(split_words("a b c"), split_words("a b c")), 0.0);
  EXPECT_DOUBLE_EQ(wer(split_words("a b c"), split_words("a x c")), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(wer(split_words("school closing in parma for tomorrow"),
                       split_words("what closing in parma for tomorrow")),
                   1.0 / 6.0);
}

TEST(Wer, EmptyReference) {
  const EditCounts e = align_words({}, split_words("x y"));
  EXPECT_EQ(e.insertions, 2u);
  EXPECT_TRUE(std::isinf(e.rate()));
  EXPECT_EQ(wer({}, {}), 0.0);
}

TEST(Wer, RandomPairsMatchDistanceTable) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> alphabet{"a", "b", "c", "d"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> ref(rng() % 9), hyp(rng() % 9);
    for (auto &w : ref) w = alphabet[rng() % alphabet.size()];
    for (auto &w : hyp) w = alphabet[rng() % alphabet.size()];
    const EditCounts e = align_words(ref, hyp);
    EXPECT_EQ(e.edits(), levenshtein(ref, hyp));
    EXPECT_EQ(e.ref_words, ref.size());
    EXPECT_EQ(ref.size() - e.deletions + e.insertions, hyp.size());
    EXPECT_EQ(e.edits(), align_words(hyp, ref).edits());
  }
}

TEST(Config, ParseOverridesAndRoundTrip) {
  ExperimentConfig c = ExperimentConfig::parse(
      "# comment\nmode = las\nW=10\nlambda=0.25\ntokenizer=wordpiece\n\nseed=9\n");
  EXPECT_EQ(c.mode, ModelMode::kLas);
  EXPECT_EQ(c.W, 10u);
  EXPECT_EQ(c.lambda, 0.25);
  EXPECT_EQ(c.tokenizer, TokenizerMode::kWordpiece);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.batch_size, 8u);
  EXPECT_EQ(c.clip, 5.0);
  const ExperimentConfig back = ExperimentConfig::parse(c.serialize());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.hash(), c.hash());
  c.seed = 10;
  EXPECT_NE(back.hash(), c.hash());
}

TEST(Config, Errors) {
  EXPECT_THROW(ExperimentConfig::parse("bogus=1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("W=-3\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("lr=fast\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("W 3\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("W=0\n").validate(), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("lr_floor=0\n").validate(), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("lr_floor=1.5\n").validate(), ConfigError);
  EXPECT_NO_THROW(ExperimentConfig::parse("lr_floor=1\n").validate());
  ExperimentConfig c;
  c.train_corpus = "/nonexistent/ntkit/train.jsonl";
  EXPECT_THROW(c.check_files(), ValidationError);
}

class TinyTraining : public ::testing::Test {
 protected:
  void SetUp() override {
    SynthCorpusOptions o;
    o.num_utterances = 12;
    train_ = synth_corpus(SynthLexicon::standard(), o);
    o.num_utterances = 4;
    o.seed = 5;
    eval_ = synth_corpus(SynthLexicon::standard(), o);
    config_.encoder_width = 8;
    config_.decoder_width = 8;
    config_.embed_dim = 4;
    config_.steps = 6;
    config_.batch_size = 3;
    config_.eval_every = 2;
    config_.beam = 2;
    inv_ = build_inventory(config_, train_);
  }
  Corpus train_, eval_;
  ExperimentConfig config_;
  SubwordInventory inv_;
};

TEST_F(TinyTraining, DeterministicCheckpointsAndMetrics) {
  for (ModelMode mode : {ModelMode::kNt, ModelMode::kLas}) {
    config_.mode = mode;
    const TrainResult a = train(config_, train_, eval_, inv_);
    const TrainResult b = train(config_, train_, eval_, inv_);
    EXPECT_EQ(serialize_checkpoint(a.final), serialize_checkpoint(b.final));
    EXPECT_EQ(serialize_checkpoint(a.best), serialize_checkpoint(b.best));
    ASSERT_EQ(a.metrics.size(), 3u);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
      EXPECT_EQ(a.metrics[i].step, 2 * (i + 1));
      EXPECT_EQ(a.metrics[i].train_loss, b.metrics[i].train_loss);
      EXPECT_EQ(a.metrics[i].eval_wer, b.metrics[i].eval_wer);
      EXPECT_GE(a.metrics[i].eval_wer, 0.0);
    }
  }
}

TEST_F(TinyTraining, LossDecreases) {
  config_.steps = 40;
  config_.eval_every = 0;
  config_.lr = 1e-2;
  const TrainResult r = train(config_, train_, eval_, inv_);
  ASSERT_EQ(r.metrics.size(), 1u);
  ModelParams init(r.final.params.config);
  init.init(config_.seed);
  Checkpoint start = r.final;
  start.params = init;
  EXPECT_LT(eval_loss(r.final, train_, inv_), eval_loss(start, train_, inv_));
}

TEST_F(TinyTraining, TransferInitAndIncompatibilities) {
  config_.mode = ModelMode::kLas;
  const Checkpoint las = train(config_, train_, eval_, inv_).final;
  config_.mode = ModelMode::kNt;
  config_.steps = 0;
  const TrainResult nt = train(config_, train_, eval_, inv_, &las);
  EXPECT_EQ(nt.final.params.flatten(), las.params.flatten());

  Checkpoint other = las;
  other.inventory_hash = "0000000000000000";
  EXPECT_THROW(train(config_, train_, eval_, inv_, &other), ValidationError);
  config_.encoder_width = 16;
  EXPECT_THROW(train(config_, train_, eval_, inv_, &las), TransferError);
}

TEST_F(TinyTraining, EvaluateReportsPerUtterance) {
  const TrainResult r = train(config_, train_, eval_, inv_);
  DecodeSettings s;
  s.beam = 2;
  const EvalResult e = evaluate(r.final, eval_, inv_, s);
  ASSERT_EQ(e.utterances.size(), eval_.size());
  EditCounts sum;
  for (const auto &u : e.utterances) {
    EXPECT_EQ(u.edits.edits(), align_words(split_words(u.reference),
                                           split_words(u.hypothesis)).edits());
    sum += u.edits;
  }
  EXPECT_EQ(sum.edits(), e.totals.edits());
  EXPECT_DOUBLE_EQ(e.wer, 100.0 * e.totals.rate());
  s.limit = 2;
  EXPECT_EQ(evaluate(r.final, eval_, inv_, s).utterances.size(), 2u);
}

TEST(Recipe, Median) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(Recipe, ReportCarriesProvenance) {
  RecipeOptions o;
  o.work_dir = (std::filesystem::temp_directory_path() /
                ("ntkit_recipe_" + std::to_string(::getpid())))
                   .string();
  o.seeds = {1};
  o.steps = 1;
  o.train_utterances = 6;
  o.eval_utterances = 2;
  o.dev_utterances = 2;
  const RecipeReport r = run_recipe("table2", o);
  EXPECT_EQ(r.cells.size(), 4u);
  EXPECT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.corpus_hash.size(), 16u);
  EXPECT_EQ(r.config_hash.size(), 16u);
  EXPECT_NE(r.summary().find("corpus_hash " + r.corpus_hash), std::string::npos);
  EXPECT_EQ(r.csv().rfind("cell,mode,tokenizer,W,k,lookahead,heads,init,steps,lambda,wer_seed1,median\n", 0),
            0u);
  // A second run reuses every cell checkpoint and reproduces the report.
  const RecipeReport again = run_recipe("table2", o);
  EXPECT_EQ(again.csv(), r.csv());
  std::filesystem::remove_all(o.work_dir);
  EXPECT_THROW(run_recipe("table3", o), ConfigError);
}

}  // namespace
}  // namespace ntkit
