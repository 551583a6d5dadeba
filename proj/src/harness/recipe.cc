// ntkit/src/harness/recipe.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/harness/recipe.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/frontend/synth.h"
#include "ntkit/harness/trainer.h"
#include "ntkit/lm/ngram.h"
#include "ntkit/text.h"

namespace ntkit {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kCellSteps = 1500;
const std::vector<double> kLambdaGrid{0.0, 0.1, 0.2, 0.3, 0.5};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Workspace {
  RecipeOptions opt;
  fs::path dir;
  std::string train_path, eval_path, dev_path;
  Corpus train, eval, dev;
  std::string corpus_hash;
  std::size_t steps = kCellSteps;

  void log(const std::string &msg) const {
    if (opt.log) opt.log(msg);
  }
};

Workspace prepare(const RecipeOptions &opt) {
  Workspace ws;
  ws.opt = opt;
  ws.dir = opt.work_dir;
  fs::create_directories(ws.dir / "cells");
  const SynthLexicon lex = SynthLexicon::standard();
  auto make = [&](std::size_t n, std::uint64_t seed, const std::string &prefix) {
    SynthCorpusOptions c;
    c.num_utterances = n;
    c.noise = opt.noise;
    c.seed = seed;
    c.id_prefix = prefix;
    return synth_corpus(lex, c);
  };
  ws.train = make(opt.train_utterances, 42, "train");
  ws.eval = make(opt.eval_utterances, 4242, "eval");
  ws.dev = make(opt.dev_utterances, 4343, "dev");
  ws.train_path = (ws.dir / "train.jsonl").string();
  ws.eval_path = (ws.dir / "eval.jsonl").string();
  ws.dev_path = (ws.dir / "dev.jsonl").string();
  save_corpus(ws.train, ws.train_path);
  save_corpus(ws.eval, ws.eval_path);
  save_corpus(ws.dev, ws.dev_path);
  ws.corpus_hash = hex64(fnv1a64(corpus_hash(ws.train) + corpus_hash(ws.eval) +
                                 corpus_hash(ws.dev)));
  if (opt.steps) ws.steps = opt.steps;
  return ws;
}

// Small enough that most units stay below word level on the synthetic lexicon.
constexpr std::size_t kRecipeWpmSize = 40;

ExperimentConfig las_config(std::size_t heads = 1,
                            TokenizerMode tok = TokenizerMode::kGrapheme) {
  ExperimentConfig c;
  c.mode = ModelMode::kLas;
  c.heads = heads;
  c.tokenizer = tok;
  c.wpm_size = kRecipeWpmSize;
  return c;
}

ExperimentConfig nt_config(std::size_t W, std::size_t k, std::size_t lookahead,
                           std::size_t heads = 1,
                           TokenizerMode tok = TokenizerMode::kGrapheme) {
  ExperimentConfig c;
  c.mode = ModelMode::kNt;
  c.W = W;
  c.k = k;
  c.lookahead = lookahead;
  c.heads = heads;
  c.tokenizer = tok;
  c.wpm_size = kRecipeWpmSize;
  return c;
}

struct Trained {
  Checkpoint ckpt;
  SubwordInventory inventory;
  std::string ckpt_path;
};

// Trains (or reloads) one cell for one seed.
Trained trained_cell(const Workspace &ws, ExperimentConfig cfg, const std::string &label,
                     const std::string &init_path) {
  cfg.train_corpus = ws.train_path;
  cfg.eval_corpus = ws.eval_path;
  cfg.steps = ws.steps;
  cfg.eval_every = 0;
  cfg.init_checkpoint = init_path;
  cfg.output_dir.clear();
  const fs::path dir = ws.dir / "cells" / cfg.hash();
  const fs::path ckpt = dir / "final.ckpt";
  if (!fs::exists(ckpt)) {
    ws.log("  train " + label + " seed " + std::to_string(cfg.seed) + " -> " +
           dir.string());
    cfg.output_dir = dir.string();
    fs::create_directories(dir);
    const std::string cfg_text = cfg.serialize();
    std::FILE *f = std::fopen((dir / "config.txt").string().c_str(), "wb");
    if (f) {
      std::fwrite(cfg_text.data(), 1, cfg_text.size(), f);
      std::fclose(f);
    }
    train(cfg);
  }
  return {load_checkpoint(ckpt.string()),
          SubwordInventory::load((dir / "inventory.txt").string()), ckpt.string()};
}

struct CellPlan {
  std::string label;
  ExperimentConfig config;
  std::string init_label;
};

struct Sweep {
  std::vector<RecipeCell> cells;
  // trained[label][seed index]
  std::map<std::string, std::vector<Trained>> trained;
};

Sweep run_cells(const Workspace &ws, const std::vector<CellPlan> &plan) {
  Sweep sweep;
  for (const CellPlan &p : plan) {
    RecipeCell cell;
    cell.label = p.label;
    cell.config = p.config;
    cell.config.steps = ws.steps;
    cell.init_label = p.init_label;
    auto &models = sweep.trained[p.label];
    for (std::size_t s = 0; s < ws.opt.seeds.size(); ++s) {
      ExperimentConfig cfg = p.config;
      cfg.seed = ws.opt.seeds[s];
      std::string init;
      if (!p.init_label.empty()) init = sweep.trained.at(p.init_label).at(s).ckpt_path;
      models.push_back(trained_cell(ws, cfg, p.label, init));
      DecodeSettings d;
      d.beam = cfg.beam;
      cell.wer.push_back(evaluate(models.back().ckpt, ws.eval, models.back().inventory, d).wer);
      ws.log("  " + p.label + " seed " + std::to_string(cfg.seed) + ": WER " +
             fmt(cell.wer.back()));
    }
    cell.median = median(cell.wer);
    sweep.cells.push_back(std::move(cell));
  }
  return sweep;
}

const RecipeCell &cell_named(const std::vector<RecipeCell> &cells, const std::string &label) {
  for (const auto &c : cells) {
    if (c.label == label) return c;
  }
  throw Error("no recipe cell '" + label + "'");
}

// a >= b, where differences under the tie margin count as a tie.
RecipeCheck at_least(const std::vector<RecipeCell> &cells, const std::string &a,
                     const std::string &b, double tie) {
  const double x = cell_named(cells, a).median, y = cell_named(cells, b).median;
  RecipeCheck c;
  c.description = a + " >= " + b;
  const double d = x - y;
  c.pass = d > -tie;
  c.detail = fmt(x) + " vs " + fmt(y) +
             (std::fabs(d) < tie ? " (tie)" : d > 0 ? " (ordered)" : " (reversed)");
  return c;
}

void fill_cells(RecipeReport &r, Sweep &&sweep) { r.cells = std::move(sweep.cells); }

RecipeReport table1(const Workspace &ws) {
  RecipeReport r;
  r.title = "NT attention window: within chunk, look-back, look-ahead (chunk 10)";
  Sweep s = run_cells(ws, {{"NT within-chunk", nt_config(10, 0, 0), ""},
                           {"NT look-back", nt_config(10, 20, 0), ""},
                           {"NT look-back+look-ahead", nt_config(10, 20, 5), ""},
                           {"LAS", las_config(), ""}});
  const double tie = ws.opt.tie_margin;
  r.checks.push_back(at_least(s.cells, "NT within-chunk", "NT look-back", tie));
  r.checks.push_back(at_least(s.cells, "NT look-back", "NT look-back+look-ahead", tie));
  for (const char *nt : {"NT within-chunk", "NT look-back", "NT look-back+look-ahead"}) {
    r.checks.push_back(at_least(s.cells, nt, "LAS", tie));
  }
  fill_cells(r, std::move(s));
  return r;
}

RecipeReport table2(const Workspace &ws) {
  RecipeReport r;
  r.title = "NT pretrained from LAS";
  Sweep s = run_cells(ws, {{"LAS", las_config(), ""},
                           {"NT W=5 scratch", nt_config(5, 20, 5), ""},
                           {"NT W=5 pretrained", nt_config(5, 20, 5), "LAS"},
                           {"NT W=10 pretrained", nt_config(10, 20, 5), "LAS"}});
  const double pre5 = cell_named(s.cells, "NT W=5 pretrained").median;
  const double scratch5 = cell_named(s.cells, "NT W=5 scratch").median;
  const double pre10 = cell_named(s.cells, "NT W=10 pretrained").median;
  const double las = cell_named(s.cells, "LAS").median;
  r.checks.push_back({"NT W=5 pretrained <= NT W=5 scratch - 0.5", pre5 <= scratch5 - 0.5,
                      fmt(pre5) + " vs " + fmt(scratch5)});
  r.checks.push_back({"|NT W=10 pretrained - LAS| <= 1.0", std::fabs(pre10 - las) <= 1.0,
                      fmt(pre10) + " vs " + fmt(las)});
  fill_cells(r, std::move(s));
  return r;
}

std::vector<CellPlan> table4_plan() {
  const auto g = TokenizerMode::kGrapheme, w = TokenizerMode::kWordpiece;
  return {{"LAS grapheme", las_config(4, g), ""},
          {"NT W=5 grapheme", nt_config(5, 20, 5, 4, g), ""},
          {"LAS wordpiece", las_config(4, w), ""},
          {"NT W=5 wordpiece", nt_config(5, 20, 5, 4, w), ""}};
}

RecipeReport table4(const Workspace &ws) {
  RecipeReport r;
  r.title = "NT and LAS with multi-head attention, graphemes vs wordpieces";
  Sweep s = run_cells(ws, table4_plan());
  const double gap_w = cell_named(s.cells, "NT W=5 wordpiece").median -
                       cell_named(s.cells, "LAS wordpiece").median;
  const double gap_g = cell_named(s.cells, "NT W=5 grapheme").median -
                       cell_named(s.cells, "LAS grapheme").median;
  r.checks.push_back({"wordpiece NT-LAS gap <= grapheme NT-LAS gap", gap_w <= gap_g,
                      fmt(gap_w) + " vs " + fmt(gap_g)});
  fill_cells(r, std::move(s));
  return r;
}

bool same_decodes(const Checkpoint &ckpt, const Corpus &corpus, const NGramLM &lm,
                  std::size_t beam) {
  DecodeSettings off;
  off.beam = beam;
  DecodeSettings zero = off;
  zero.lm = &lm;
  const SearchOptions a = search_options(ckpt, off), b = search_options(ckpt, zero);
  for (const auto &u : corpus) {
    const DecodeResult x = beam_search(ckpt.params, u.features, a);
    const DecodeResult y = beam_search(ckpt.params, u.features, b);
    if (x.labels != y.labels || x.best.score != y.best.score ||
        x.best.score_model != y.best.score_model || x.attention.data != y.attention.data) {
      return false;
    }
  }
  return true;
}

RecipeReport fusion(const Workspace &ws) {
  RecipeReport r;
  r.title = "shallow fusion with an n-gram LM (lambda tuned on dev)";
  std::vector<CellPlan> plan;
  for (const auto &p : table4_plan()) {
    if (p.config.tokenizer == TokenizerMode::kWordpiece) plan.push_back(p);
  }
  Sweep s = run_cells(ws, plan);
  std::vector<RecipeCell> cells;
  bool identical = true;
  for (const CellPlan &p : plan) {
    const auto &models = s.trained.at(p.label);
    const SubwordInventory &inv = models.front().inventory;
    std::vector<std::vector<TokenId>> text;
    for (const auto &u : ws.train) text.push_back(transcript_tokens(u, inv));
    const NGramLM lm = train_ngram(text, p.config.lm_order, inv.size());
    lm.save((ws.dir / ("lm-" + inv.hash() + ".txt")).string());

    RecipeCell base = cell_named(s.cells, p.label);
    base.label = p.label + " lambda=0";
    RecipeCell tuned = base;
    tuned.label = p.label + " lambda=tuned";
    tuned.wer.clear();
    std::string chosen;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const Trained &m = models[i];
      DecodeSettings d;
      d.beam = p.config.beam;
      d.lm = &lm;
      double best_lambda = 0.0, best_dev = INFINITY;
      for (double lambda : kLambdaGrid) {
        d.fusion.lambda = lambda;
        const double dev = evaluate(m.ckpt, ws.dev, inv, d).wer;
        ws.log("  " + p.label + " seed " + std::to_string(ws.opt.seeds[i]) +
               " lambda " + fmt(lambda) + ": dev WER " + fmt(dev));
        if (dev < best_dev) {
          best_dev = dev;
          best_lambda = lambda;
        }
      }
      d.fusion.lambda = best_lambda;
      tuned.wer.push_back(evaluate(m.ckpt, ws.eval, inv, d).wer);
      chosen += (chosen.empty() ? "" : ",") + fmt(best_lambda);
      identical = identical && same_decodes(m.ckpt, ws.eval, lm, p.config.beam);
    }
    tuned.median = median(tuned.wer);
    r.checks.push_back({p.label + ": tuned median <= lambda=0 median + 0.2",
                        tuned.median <= base.median + 0.2,
                        fmt(tuned.median) + " vs " + fmt(base.median) + " (lambda " +
                            chosen + ")"});
    cells.push_back(std::move(base));
    cells.push_back(std::move(tuned));
  }
  r.checks.push_back({"lambda=0, eta=0 decodes bit-identical to fusion off", identical,
                      identical ? "all eval utterances" : "mismatch"});
  r.cells = std::move(cells);
  return r;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool RecipeReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const RecipeCheck &c) { return c.pass; });
}

std::string RecipeReport::csv() const {
  std::ostringstream out;
  out << "cell,mode,tokenizer,W,k,lookahead,heads,init,steps,lambda";
  for (auto s : seeds) out << ",wer_seed" << s;
  out << ",median\n";
  for (const auto &c : cells) {
    const ExperimentConfig &k = c.config;
    out << c.label << ',' << model_mode_name(k.mode) << ',' << mode_name(k.tokenizer) << ',';
    if (k.mode == ModelMode::kNt) {
      out << k.W << ',' << k.k << ',' << k.lookahead;
    } else {
      out << "-,-,-";
    }
    out << ',' << k.heads << ',' << (c.init_label.empty() ? "-" : c.init_label) << ','
        << k.steps << ',' << (c.label.find("lambda=tuned") != std::string::npos ? "dev" : "0");
    for (double w : c.wer) out << ',' << fmt(w);
    out << ',' << fmt(c.median) << '\n';
  }
  return out.str();
}

std::string RecipeReport::summary() const {
  std::ostringstream out;
  out << "recipe " << name << ": " << title << "\n";
  out << "config_hash " << config_hash << "\ncorpus_hash " << corpus_hash << "\nseeds";
  for (auto s : seeds) out << ' ' << s;
  out << "\nsteps per cell " << (cells.empty() ? 0 : cells.front().config.steps) << "\n";
  for (const auto &c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.description << ": " << c.detail << "\n";
  }
  out << "result " << (passed() ? "PASS" : "FAIL") << " (" << wall_ms / 1000 << " s)\n";
  return out.str();
}

std::vector<std::string> recipe_names() { return {"table1", "table2", "table4", "fusion"}; }

RecipeReport run_recipe(const std::string &name, const RecipeOptions &options) {
  const auto names = recipe_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown recipe '" + name + "' (table1, table2, table4, fusion)");
  }
  if (options.seeds.empty()) throw ConfigError("recipe needs at least one seed");
  const auto t0 = std::chrono::steady_clock::now();
  const Workspace ws = prepare(options);
  ws.log("recipe " + name + ": corpus " + ws.corpus_hash);
  RecipeReport r = name == "table1"   ? table1(ws)
                   : name == "table2" ? table2(ws)
                   : name == "table4" ? table4(ws)
                                      : fusion(ws);
  r.name = name;
  r.seeds = options.seeds;
  r.corpus_hash = ws.corpus_hash;
  std::string all;
  for (const auto &c : r.cells) {
    ExperimentConfig k = c.config;
    k.train_corpus.clear();
    k.eval_corpus.clear();
    k.init_checkpoint = c.init_label;
    all += k.serialize();
  }
  r.config_hash = hex64(fnv1a64(all));
  r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

}  // namespace ntkit
