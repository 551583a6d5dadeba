// ntkit/src/harness/trainer.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/harness/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"
#include "ntkit/error.h"
#include "ntkit/numerics/adam.h"
#include "ntkit/targets/block_targets.h"
#include "ntkit/text.h"

namespace ntkit {

std::string MetricsRecord::to_json() const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["train_loss"] = train_loss;
  j["eval_loss"] = eval_loss;
  j["eval_wer"] = eval_wer;
  j["wall_ms"] = wall_ms;
  return j.dump();
}

SubwordInventory build_inventory(const ExperimentConfig &config, const Corpus &train) {
  if (!config.inventory.empty()) {
    SubwordInventory inv = SubwordInventory::load(config.inventory);
    if (inv.mode() != config.tokenizer) {
      throw ConfigError("inventory '" + config.inventory + "' is " +
                        std::string(mode_name(inv.mode())) + ", config wants " +
                        std::string(mode_name(config.tokenizer)));
    }
    return inv;
  }
  std::vector<std::string> lines;
  for (const auto &u : train) lines.push_back(u.transcript);
  if (config.tokenizer == TokenizerMode::kGrapheme) return SubwordInventory::graphemes(lines);
  return train_wordpieces(lines, config.wpm_size);
}

std::vector<TokenId> transcript_tokens(const Utterance &utt,
                                       const SubwordInventory &inventory) {
  std::vector<TokenId> out;
  for (const auto &w : word_tokens(utt.alignment.words(), inventory)) {
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

namespace {

struct Example {
  const Utterance *utt;
  BlockTargets blocks;          // NT
  std::vector<TokenId> tokens;  // LAS: transcript + <eos>
};

std::vector<Example> make_examples(const Checkpoint &ckpt, const Corpus &corpus,
                                   const SubwordInventory &inventory) {
  std::vector<Example> out;
  for (const auto &u : corpus) {
    Example e{&u, {}, {}};
    if (ckpt.mode == ModelMode::kNt) {
      e.blocks = utterance_targets(u, inventory, ckpt.window.W, ckpt.max_per_block);
    } else {
      e.tokens = transcript_tokens(u, inventory);
      e.tokens.push_back(SubwordInventory::kEos);
    }
    out.push_back(std::move(e));
  }
  return out;
}

GradientResult example_gradients(const Checkpoint &ckpt, const Example &e) {
  return ckpt.mode == ModelMode::kNt
             ? nt_gradients(ckpt.params, e.utt->features, e.blocks, ckpt.window)
             : las_gradients(ckpt.params, e.utt->features, e.tokens);
}

double loss_over(const Checkpoint &ckpt, const std::vector<Example> &examples) {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto &e : examples) {
    const ForwardResult r =
        ckpt.mode == ModelMode::kNt
            ? nt_forward(ckpt.params, e.utt->features, e.blocks, ckpt.window)
            : las_forward(ckpt.params, e.utt->features, e.tokens);
    total += r.loss * static_cast<double>(r.token_log_probs.size());
    tokens += r.token_log_probs.size();
  }
  return tokens ? total / static_cast<double>(tokens) : 0.0;
}

void check_corpus(const Corpus &corpus, const std::string &what) {
  if (corpus.empty()) throw ValidationError(what + " corpus is empty");
  const std::size_t dim = corpus.front().features.dim();
  for (const auto &u : corpus) {
    if (u.features.dim() != dim) {
      throw ValidationError(what + " corpus utterance '" + u.id() + "' has width " +
                            std::to_string(u.features.dim()) + ", expected " +
                            std::to_string(dim));
    }
  }
}

}  // namespace

SearchOptions search_options(const Checkpoint &ckpt, const DecodeSettings &settings) {
  SearchOptions opt;
  opt.mode = ckpt.mode;
  opt.window = ckpt.window;
  opt.beam = settings.beam;
  opt.max_per_block = ckpt.max_per_block;
  opt.max_len = ckpt.max_len;
  opt.lm = settings.lm;
  opt.fusion = settings.fusion;
  return opt;
}

double eval_loss(const Checkpoint &ckpt, const Corpus &corpus,
                 const SubwordInventory &inventory) {
  return loss_over(ckpt, make_examples(ckpt, corpus, inventory));
}

EvalResult evaluate(const Checkpoint &ckpt, const Corpus &corpus,
                    const SubwordInventory &inventory, const DecodeSettings &settings) {
  check_inventory(ckpt, inventory);
  const SearchOptions opt = search_options(ckpt, settings);
  EvalResult res;
  const std::size_t n =
      settings.limit ? std::min(settings.limit, corpus.size()) : corpus.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Utterance &u = corpus[i];
    UtteranceResult r;
    r.id = u.id();
    r.reference = u.transcript;
    r.decode = beam_search(ckpt.params, u.features, opt);
    r.hypothesis = decode(r.decode.labels, inventory);
    r.edits = align_words(split_words(r.reference), split_words(r.hypothesis));
    res.totals += r.edits;
    res.utterances.push_back(std::move(r));
  }
  res.wer = 100.0 * res.totals.rate();
  return res;
}

TrainResult train(const ExperimentConfig &config, const Corpus &train_corpus,
                  const Corpus &eval_corpus, const SubwordInventory &inventory,
                  const Checkpoint *init, const MetricsCallback &on_metrics) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  check_corpus(train_corpus, "training");
  check_corpus(eval_corpus, "evaluation");

  Checkpoint ckpt;
  ckpt.mode = config.mode;
  ckpt.window = config.window();
  ckpt.inventory_hash = inventory.hash();
  ckpt.params = ModelParams(
      config.model_config(train_corpus.front().features.dim(), inventory.size()));
  ckpt.params.init(config.seed);
  if (config.mode == ModelMode::kNt) {
    ckpt.max_per_block = config.M ? config.M : default_cap(train_corpus, inventory, config.W);
  } else {
    std::size_t longest = 0;
    for (const auto &u : train_corpus) {
      longest = std::max(longest, transcript_tokens(u, inventory).size());
    }
    ckpt.max_len = config.max_len ? config.max_len : 2 * longest;
  }
  if (init != nullptr) {
    if (config.mode != ModelMode::kNt || init->mode != ModelMode::kLas) {
      throw ConfigError("initialization transfers a LAS checkpoint into an NT model");
    }
    check_inventory(*init, inventory);
    ckpt.params = transfer_from_las(init->params, ckpt.params.config);
  }

  const std::vector<Example> train_ex = make_examples(ckpt, train_corpus, inventory);
  const std::vector<Example> eval_ex = make_examples(ckpt, eval_corpus, inventory);

  DecodeSettings dec;
  dec.beam = config.beam;
  dec.limit = config.eval_wer_utterances;

  Vec flat = ckpt.params.flatten();
  AdamState adam(flat.size(), config.lr);
  std::mt19937_64 rng(config.seed ^ 0x5eedULL);
  std::vector<std::size_t> order(train_ex.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  TrainResult out;
  double best_wer = INFINITY, best_loss = INFINITY;
  double loss_acc = 0.0;
  std::size_t loss_steps = 0;

  auto record = [&](std::size_t step) {
    MetricsRecord m;
    m.step = step;
    m.train_loss = loss_steps ? loss_acc / static_cast<double>(loss_steps) : 0.0;
    m.eval_loss = loss_over(ckpt, eval_ex);
    m.eval_wer = evaluate(ckpt, eval_corpus, inventory, dec).wer;
    m.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    loss_acc = 0.0;
    loss_steps = 0;
    if (m.eval_wer < best_wer || (m.eval_wer == best_wer && m.eval_loss < best_loss)) {
      best_wer = m.eval_wer;
      best_loss = m.eval_loss;
      out.best = ckpt;
    }
    out.metrics.push_back(m);
    if (on_metrics) on_metrics(m);
  };

  Vec grad(flat.size());
  for (std::size_t step = 1; step <= config.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double batch_loss = 0.0;
    for (std::size_t b = 0; b < config.batch_size; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const GradientResult g = example_gradients(ckpt, train_ex[order[cursor++]]);
      batch_loss += g.loss;
      std::size_t off = 0;
      g.grads.for_each_tensor([&](const std::string &, const Tensor2 &t) {
        for (double v : t.data) grad[off++] += v;
      });
    }
    const double inv_b = 1.0 / static_cast<double>(config.batch_size);
    double norm2 = 0.0;
    for (double &v : grad) {
      v *= inv_b;
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    if (!std::isfinite(norm)) {
      throw Error("non-finite gradient at step " + std::to_string(step));
    }
    if (norm > config.clip) {
      const double s = config.clip / norm;
      for (double &v : grad) v *= s;
    }
    const std::size_t half = config.steps / 2;
    if (step > half) {
      const double f = static_cast<double>(step - half) /
                       static_cast<double>(config.steps - half);
      adam.lr = config.lr * (1.0 - f * (1.0 - config.lr_floor));
    }
    adam_update(flat, grad, adam);
    ckpt.params.unflatten(flat);
    loss_acc += batch_loss * inv_b;
    ++loss_steps;
    if (config.eval_every && step % config.eval_every == 0 && step != config.steps) {
      record(step);
    }
  }
  record(config.steps);
  out.final = ckpt;
  return out;
}

TrainResult train(const ExperimentConfig &config) {
  config.validate();
  if (config.train_corpus.empty() || config.eval_corpus.empty()) {
    throw ConfigError("train needs train_corpus and eval_corpus");
  }
  if (config.output_dir.empty()) throw ConfigError("train needs output_dir");
  config.check_files();
  const Corpus train_corpus = load_corpus(config.train_corpus);
  const Corpus eval_corpus = load_corpus(config.eval_corpus);
  const SubwordInventory inventory = build_inventory(config, train_corpus);
  std::optional<Checkpoint> init;
  if (!config.init_checkpoint.empty()) init = load_checkpoint(config.init_checkpoint);

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  inventory.save((dir / "inventory.txt").string());
  std::ofstream metrics((dir / "metrics.jsonl").string());
  if (!metrics) throw Error("cannot write metrics in '" + config.output_dir + "'");
  TrainResult r = train(config, train_corpus, eval_corpus, inventory,
                        init ? &*init : nullptr, [&](const MetricsRecord &m) {
                          metrics << m.to_json() << "\n";
                          metrics.flush();
                        });
  save_checkpoint(r.best, (dir / "best.ckpt").string());
  save_checkpoint(r.final, (dir / "final.ckpt").string());
  return r;
}

}  // namespace ntkit
