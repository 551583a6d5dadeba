// ntkit/include/ntkit/harness/recipe.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_HARNESS_RECIPE_H_
#define NTKIT_HARNESS_RECIPE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ntkit/harness/config.h"

namespace ntkit {

struct RecipeOptions {
  // Corpora and per-cell checkpoints are written here; a cell whose
  // checkpoint already exists is not retrained.
  std::string work_dir = "recipes";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t train_utterances = 500;
  std::size_t eval_utterances = 100;
  std::size_t dev_utterances = 100;
  double noise = 0.1;
  // Per-cell step budget; 0 keeps the recipe's own budget.
  std::size_t steps = 0;
  // Two WER medians closer than this are a tie.
  double tie_margin = 0.5;
  std::function<void(const std::string &)> log;
};

struct RecipeCell {
  std::string label;
  ExperimentConfig config;  // seed-free template
  std::string init_label;   // cell providing the LAS initialization
  std::vector<double> wer;  // one per seed, percent
  double median = 0.0;
};

struct RecipeCheck {
  std::string description;
  bool pass = false;
  std::string detail;
};

struct RecipeReport {
  std::string name;
  std::string title;
  std::vector<RecipeCell> cells;
  std::vector<RecipeCheck> checks;
  std::vector<std::uint64_t> seeds;
  std::string config_hash;
  std::string corpus_hash;
  long long wall_ms = 0;

  bool passed() const;
  std::string csv() const;
  std::string summary() const;
};

std::vector<std::string> recipe_names();

// Throws ConfigError for an unknown name.
RecipeReport run_recipe(const std::string &name, const RecipeOptions &options = {});

double median(std::vector<double> values);

}  // namespace ntkit

#endif  // NTKIT_HARNESS_RECIPE_H_
