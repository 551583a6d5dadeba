// ntkit/tests/unit/frontend_test.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "ntkit/error.h"
#include "ntkit/frontend/corpus.h"
#include "ntkit/frontend/features.h"
#include "ntkit/frontend/synth.h"

namespace ntkit {
namespace {

RawFrames make_raw(std::size_t t_raw, std::size_t d) {
  RawFrames raw;
  raw.frames = Tensor2(t_raw, d);
  for (std::size_t t = 0; t < t_raw; ++t) {
    for (std::size_t k = 0; k < d; ++k) {
      raw.frames(t, k) = (k % 2 == 0 ? 1.0 : -1.0) * static_cast<double>(t + 1);
    }
  }
  return raw;
}

TEST(StackAndDownsample, ExactDivision) {
  auto f = stack_and_downsample(make_raw(9, 2));
  EXPECT_EQ(f.num_frames(), 3u);
  EXPECT_EQ(f.dim(), 6u);
  EXPECT_EQ(f.frame_shift_ms, 30);
}

// Expected rows produced by tests/fixtures/stack_reference.py.
TEST(StackAndDownsample, MatchesReferenceScript) {
  auto f = stack_and_downsample(make_raw(9, 1));
  const std::vector<std::vector<double>> want9{
      {1, 1, 1}, {2, 3, 4}, {5, 6, 7}};
  ASSERT_EQ(f.num_frames(), 3u);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(f.frames(t, c), want9[t][c]);
  }

  auto g = stack_and_downsample(make_raw(10, 2));
  const std::vector<std::vector<double>> want10{
      {1, -1, 1, -1, 1, -1},
      {2, -2, 3, -3, 4, -4},
      {5, -5, 6, -6, 7, -7},
      {8, -8, 9, -9, 10, -10}};
  ASSERT_EQ(g.num_frames(), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(g.frames(t, c), want10[t][c]);
  }
}

TEST(StackAndDownsample, CeilDivisionLawExhaustive) {
  for (std::size_t t_raw = 1; t_raw <= 100; ++t_raw) {
    auto f = stack_and_downsample(make_raw(t_raw, 3));
    EXPECT_EQ(f.num_frames(), (t_raw + 2) / 3) << "T_raw=" << t_raw;
    EXPECT_EQ(f.dim(), 9u);
  }
}

TEST(StackAndDownsample, EmptyInputIsAnError) {
  EXPECT_THROW(stack_and_downsample(make_raw(0, 2)), ValidationError);
}

TEST(SynthUtterance, SingleWordShapeAndAlignment) {
  SynthLexicon lex;
  lex.words = {"ab"};
  lex.frames_per_char = 2;
  auto utt = synth_utterance({"ab"}, lex, 0.0, 1, "u");
  EXPECT_EQ(utt.features.num_frames(), 4u);
  EXPECT_EQ(utt.features.dim(), 3 * lex.raw_dim);
  ASSERT_EQ(utt.alignment.entries.size(), 1u);
  EXPECT_EQ(utt.alignment.entries[0], (AlignedWord{"ab", 0, 3}));
  EXPECT_EQ(utt.transcript, "ab");
}

TEST(SynthUtterance, DeterministicPerSeed) {
  auto lex = SynthLexicon::standard();
  auto a = synth_utterance({"good", "dog"}, lex, 0.3, 99, "x");
  auto b = synth_utterance({"good", "dog"}, lex, 0.3, 99, "x");
  EXPECT_EQ(a, b);
  auto c = synth_utterance({"good", "dog"}, lex, 0.3, 100, "x");
  EXPECT_NE(a.features.frames, c.features.frames);
  EXPECT_EQ(a.alignment, c.alignment);
}

TEST(SynthUtterance, GapsSeparateWords) {
  auto lex = SynthLexicon::standard();
  auto utt = synth_utterance({"go", "tent"}, lex, 0.0, 1);
  ASSERT_EQ(utt.alignment.entries.size(), 2u);
  EXPECT_EQ(utt.alignment.entries[0], (AlignedWord{"go", 0, 3}));
  EXPECT_EQ(utt.alignment.entries[1], (AlignedWord{"tent", 5, 12}));
  EXPECT_EQ(utt.features.num_frames(), 13u);
  validate_alignment(utt.alignment, utt.features.num_frames(), "x");
}

TEST(SynthUtterance, TrailingSilence) {
  SynthLexicon lex;
  lex.words = {"ab"};
  lex.trailing_frames = 2;
  auto utt = synth_utterance({"ab"}, lex, 0.0, 1, "u");
  ASSERT_EQ(utt.features.num_frames(), 6u);
  EXPECT_EQ(utt.alignment.entries[0], (AlignedWord{"ab", 0, 3}));
  // Stacking reaches two raw frames back, so only the last frame is all zero.
  for (double v : utt.features.frames.row(5)) EXPECT_EQ(v, 0.0);
}

TEST(SynthCorpus, UtterancesEndInSilence) {
  SynthCorpusOptions opt;
  opt.num_utterances = 5;
  for (const auto &u : synth_corpus(SynthLexicon::standard(), opt)) {
    EXPECT_EQ(u.features.num_frames(),
              u.alignment.entries.back().end_frame + 1 + opt.trailing_frames);
  }
}

TEST(SynthUtterance, UnknownWordIsLexiconError) {
  auto lex = SynthLexicon::standard();
  EXPECT_THROW(synth_utterance({"zebra"}, lex, 0.0, 1), LexiconError);
}

TEST(ValidateAlignment, RejectsBadEntries) {
  WordAlignment a;
  a.entries = {{"x", 0, 3}, {"y", 3, 5}};
  EXPECT_THROW(validate_alignment(a, 10, "u"), ValidationError);
  a.entries = {{"x", 4, 3}};
  EXPECT_THROW(validate_alignment(a, 10, "u"), ValidationError);
  a.entries = {{"x", 0, 10}};
  EXPECT_THROW(validate_alignment(a, 10, "u"), ValidationError);
  a.entries = {{"x", 0, 9}};
  EXPECT_NO_THROW(validate_alignment(a, 10, "u"));
}

class CorpusFile : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = (std::filesystem::temp_directory_path() /
             ("ntkit_corpus_" + std::to_string(::getpid()) + ".jsonl"))
                .string();
  }
  void TearDown() override { std::remove(path_.c_str()); }
  void write(const std::string &text) {
    std::ofstream out(path_);
    out << text;
  }
  std::string path_;
};

TEST_F(CorpusFile, RoundTripIsBitExact) {
  SynthCorpusOptions opt;
  opt.num_utterances = 12;
  opt.noise = 0.37;
  auto corpus = synth_corpus(SynthLexicon::standard(), opt);
  save_corpus(corpus, path_);
  auto loaded = load_corpus(path_);
  ASSERT_EQ(loaded.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(loaded[i], corpus[i]) << "utterance " << i;
  }
  EXPECT_EQ(corpus_hash(loaded), corpus_hash(corpus));
}

TEST_F(CorpusFile, MalformedLineReportsLineNumber) {
  auto utt = synth_utterance({"go"}, SynthLexicon::standard(), 0.0, 1, "a");
  write(serialize_utterance(utt) + "\n{\"id\": \"b\", \"transcript\": \n");
  try {
    load_corpus(path_);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST_F(CorpusFile, AlignmentViolationNamesUtterance) {
  write(R"({"id":"bad-1","transcript":"go","frames":[[0.0],[1.0]],"alignment":[["go",0,5]]})"
        "\n");
  try {
    load_corpus(path_);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("bad-1"), std::string::npos);
  }
}

TEST_F(CorpusFile, MissingFileIsParseError) {
  EXPECT_THROW(load_corpus(path_ + ".missing"), ParseError);
}

TEST(SynthCorpus, DeterministicAndWithinWordBounds) {
  SynthCorpusOptions opt;
  opt.num_utterances = 30;
  auto a = synth_corpus(SynthLexicon::standard(), opt);
  auto b = synth_corpus(SynthLexicon::standard(), opt);
  EXPECT_EQ(corpus_hash(a), corpus_hash(b));
  for (const auto &u : a) {
    EXPECT_GE(u.alignment.entries.size(), opt.min_words);
    EXPECT_LE(u.alignment.entries.size(), opt.max_words);
  }
}

}  // namespace
}  // namespace ntkit
