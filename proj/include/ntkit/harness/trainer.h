// ntkit/include/ntkit/harness/trainer.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_HARNESS_TRAINER_H_
#define NTKIT_HARNESS_TRAINER_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ntkit/frontend/corpus.h"
#include "ntkit/harness/config.h"
#include "ntkit/harness/wer.h"
#include "ntkit/lm/ngram.h"
#include "ntkit/models/checkpoint.h"

namespace ntkit {

struct MetricsRecord {
  std::size_t step = 0;
  double train_loss = 0.0;
  double eval_loss = 0.0;
  double eval_wer = 0.0;
  long long wall_ms = 0;

  std::string to_json() const;
};

// Grapheme inventory, wordpiece inventory trained on the transcripts, or the
// file named by config.inventory.
SubwordInventory build_inventory(const ExperimentConfig &config, const Corpus &train);

// Training token sequence of one utterance (separators included, no <eos>).
std::vector<TokenId> transcript_tokens(const Utterance &utt,
                                       const SubwordInventory &inventory);

struct TrainResult {
  Checkpoint best;
  Checkpoint final;
  std::vector<MetricsRecord> metrics;
};

using MetricsCallback = std::function<void(const MetricsRecord &)>;

// Deterministic Adam training. `init` (NT only) is a LAS checkpoint whose
// parameters are transferred before the first step. Incompatibilities are
// reported before any step runs.
TrainResult train(const ExperimentConfig &config, const Corpus &train_corpus,
                  const Corpus &eval_corpus, const SubwordInventory &inventory,
                  const Checkpoint *init = nullptr,
                  const MetricsCallback &on_metrics = {});

// File-driven variant: loads corpora/inventory/init checkpoint named in the
// config and writes inventory.txt, best.ckpt, final.ckpt and metrics.jsonl to
// config.output_dir.
TrainResult train(const ExperimentConfig &config);

struct UtteranceResult {
  std::string id;
  std::string reference;
  std::string hypothesis;
  EditCounts edits;
  DecodeResult decode;
};

struct EvalResult {
  EditCounts totals;
  double wer = 0.0;  // percent
  std::vector<UtteranceResult> utterances;
};

struct DecodeSettings {
  std::size_t beam = 8;
  const NGramLM *lm = nullptr;
  FusionWeights fusion;
  // Uses only the first n utterances when nonzero.
  std::size_t limit = 0;
};

EvalResult evaluate(const Checkpoint &ckpt, const Corpus &corpus,
                    const SubwordInventory &inventory, const DecodeSettings &settings);

// Mean teacher-forced loss per token.
double eval_loss(const Checkpoint &ckpt, const Corpus &corpus,
                 const SubwordInventory &inventory);

SearchOptions search_options(const Checkpoint &ckpt, const DecodeSettings &settings);

}  // namespace ntkit

#endif  // NTKIT_HARNESS_TRAINER_H_
