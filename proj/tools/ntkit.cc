// ntkit/tools/ntkit.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "ntkit/error.h"
#include "ntkit/frontend/synth.h"
#include "ntkit/harness/config.h"
#include "ntkit/harness/recipe.h"
#include "ntkit/harness/toy.h"
#include "ntkit/harness/trainer.h"
#include "ntkit/lm/ngram.h"
#include "ntkit/targets/block_targets.h"
#include "ntkit/text.h"

namespace ntkit {
namespace {

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

struct DecodeFlags {
  std::string checkpoint, inventory, corpus, lm;
  std::size_t beam = 8;
  FusionWeights fusion;

  void add(CLI::App *app) {
    app->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
    app->add_option("--inventory", inventory, "unit inventory")->required();
    app->add_option("--corpus", corpus, "corpus (jsonl)")->required();
    app->add_option("--beam", beam, "beam width")->capture_default_str();
    app->add_option("--lm", lm, "n-gram LM for shallow fusion");
    app->add_option("--lambda", fusion.lambda, "LM weight")->capture_default_str();
    app->add_option("--eta", fusion.eta, "coverage weight")->capture_default_str();
    app->add_option("--beta", fusion.beta, "coverage threshold")->capture_default_str();
  }
};

struct Loaded {
  Checkpoint ckpt;
  SubwordInventory inventory;
  Corpus corpus;
  std::optional<NGramLM> lm;
  DecodeSettings settings;
};

Loaded load_for_decoding(const DecodeFlags &f) {
  Loaded l;
  l.ckpt = load_checkpoint(f.checkpoint);
  l.inventory = SubwordInventory::load(f.inventory);
  check_inventory(l.ckpt, l.inventory);
  l.corpus = load_corpus(f.corpus);
  if (!f.lm.empty()) l.lm = NGramLM::load(f.lm);
  f.fusion.validate();
  if (f.beam == 0) throw ConfigError("beam must be >= 1");
  l.settings.beam = f.beam;
  l.settings.fusion = f.fusion;
  l.settings.lm = l.lm ? &*l.lm : nullptr;
  return l;
}

int run(int argc, char **argv) {
  CLI::App app{"ntkit: streaming and full-sequence attention speech recognizers"};
  app.require_subcommand(1);

  // synth-corpus
  auto *synth = app.add_subcommand("synth-corpus", "write a synthetic corpus");
  SynthCorpusOptions so;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output jsonl")->required();
  synth->add_option("--utterances", so.num_utterances)->capture_default_str();
  synth->add_option("--noise", so.noise)->capture_default_str();
  synth->add_option("--seed", so.seed)->capture_default_str();
  synth->add_option("--prefix", so.id_prefix)->capture_default_str();
  synth->add_option("--min-words", so.min_words)->capture_default_str();
  synth->add_option("--max-words", so.max_words)->capture_default_str();
  synth->add_option("--trailing-frames", so.trailing_frames, "silence after the last word")
      ->capture_default_str();

  // train-wpm
  auto *wpm = app.add_subcommand("train-wpm", "train a wordpiece inventory");
  std::string wpm_corpus, wpm_out;
  std::size_t wpm_size = 200;
  wpm->add_option("--corpus", wpm_corpus)->required();
  wpm->add_option("--size", wpm_size, "content units")->capture_default_str();
  wpm->add_option("--out", wpm_out)->required();

  // train-lm
  auto *tlm = app.add_subcommand("train-lm", "train a Witten-Bell n-gram LM over units");
  std::string lm_corpus, lm_inventory, lm_out;
  std::size_t lm_order = 3;
  tlm->add_option("--corpus", lm_corpus)->required();
  tlm->add_option("--inventory", lm_inventory)->required();
  tlm->add_option("--order", lm_order)->capture_default_str();
  tlm->add_option("--out", lm_out)->required();

  // train
  auto *tr = app.add_subcommand("train", "train a model");
  std::string config_path;
  std::map<std::string, std::string> overrides;
  tr->add_option("--config", config_path, "key=value config file");
  for (const std::string &key : ExperimentConfig::keys()) {
    tr->add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string &v) { overrides[key] = v; },
        "override " + key);
  }

  // eval
  auto *ev = app.add_subcommand("eval", "decode a corpus and score WER");
  DecodeFlags ev_flags;
  ev_flags.add(ev);
  std::size_t ev_limit = 0;
  bool ev_details = false;
  ev->add_option("--limit", ev_limit, "first n utterances only");
  ev->add_flag("--details", ev_details, "print every utterance");

  // decode
  auto *dec = app.add_subcommand("decode", "decode one utterance");
  DecodeFlags dec_flags;
  dec_flags.add(dec);
  std::string dec_utt, dump_attention;
  bool dump_targets_flag = false;
  dec->add_option("--utterance", dec_utt, "utterance id (default: first)");
  dec->add_option("--dump-attention", dump_attention, "write attention CSV here");
  dec->add_flag("--dump-targets", dump_targets_flag, "print the reference block targets");

  // recipe
  auto *rec = app.add_subcommand("recipe", "run an experiment sweep");
  std::string recipe_name, recipe_out;
  RecipeOptions ro;
  rec->add_option("name", recipe_name, "table1 | table2 | table4 | fusion | all")->required();
  rec->add_option("--work-dir", ro.work_dir)->capture_default_str();
  rec->add_option("--seeds", ro.seeds)->delimiter(',');
  rec->add_option("--steps", ro.steps, "per-cell steps (0: recipe default)");
  rec->add_option("--train-utterances", ro.train_utterances)->capture_default_str();
  rec->add_option("--eval-utterances", ro.eval_utterances)->capture_default_str();
  rec->add_option("--out", recipe_out, "report directory (default: work dir)");

  // grad-check
  auto *gc = app.add_subcommand("grad-check", "finite-difference gradient check");
  std::string gc_mode = "both";
  std::size_t gc_heads = 1;
  std::uint64_t gc_seed = 1;
  GradCheckOptions gco;
  gco.samples = 128;
  gc->add_option("--mode", gc_mode, "las | nt | both")->capture_default_str();
  gc->add_option("--heads", gc_heads)->capture_default_str();
  gc->add_option("--seed", gc_seed)->capture_default_str();
  gc->add_option("--samples", gco.samples)->capture_default_str();
  gc->add_option("--step", gco.step)->capture_default_str();
  gc->add_option("--tolerance", gco.tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*synth) {
    const Corpus c = synth_corpus(SynthLexicon::standard(), so);
    save_corpus(c, synth_out);
    std::printf("%zu utterances -> %s (hash %s)\n", c.size(), synth_out.c_str(),
                corpus_hash(c).c_str());
  } else if (*wpm) {
    std::vector<std::string> lines;
    for (const auto &u : load_corpus(wpm_corpus)) lines.push_back(u.transcript);
    const SubwordInventory inv = train_wordpieces(lines, wpm_size);
    inv.save(wpm_out);
    std::printf("%zu units -> %s (hash %s)\n", inv.size(), wpm_out.c_str(),
                inv.hash().c_str());
  } else if (*tlm) {
    const SubwordInventory inv = SubwordInventory::load(lm_inventory);
    std::vector<std::vector<TokenId>> text;
    for (const auto &u : load_corpus(lm_corpus)) text.push_back(transcript_tokens(u, inv));
    const NGramLM lm = train_ngram(text, lm_order, inv.size());
    lm.save(lm_out);
    std::printf("order %zu, %zu sequences -> %s\n", lm_order, text.size(), lm_out.c_str());
  } else if (*tr) {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
    for (const auto &[k, v] : overrides) cfg.set(k, v);
    cfg.validate();
    std::printf("config %s\n", cfg.hash().c_str());
    const TrainResult r = train(cfg);
    const MetricsRecord &last = r.metrics.back();
    std::printf("step %zu train_loss %.6f eval_loss %.6f eval_wer %.2f\n", last.step,
                last.train_loss, last.eval_loss, last.eval_wer);
    std::printf("wrote %s/{final.ckpt,best.ckpt,metrics.jsonl,inventory.txt}\n",
                cfg.output_dir.c_str());
  } else if (*ev) {
    Loaded l = load_for_decoding(ev_flags);
    l.settings.limit = ev_limit;
    const EvalResult r = evaluate(l.ckpt, l.corpus, l.inventory, l.settings);
    if (ev_details) {
      for (const auto &u : r.utterances) {
        std::printf("%s\tref=%s\thyp=%s\terrors=%zu\n", u.id.c_str(), u.reference.c_str(),
                    u.hypothesis.c_str(), u.edits.edits());
      }
    }
    std::printf("WER %.2f%% (S=%zu D=%zu I=%zu N=%zu, %zu utterances)\n", r.wer,
                r.totals.substitutions, r.totals.deletions, r.totals.insertions,
                r.totals.ref_words, r.utterances.size());
  } else if (*dec) {
    const Loaded l = load_for_decoding(dec_flags);
    const Utterance *utt = nullptr;
    for (const auto &u : l.corpus) {
      if (dec_utt.empty() || u.id() == dec_utt) {
        utt = &u;
        break;
      }
    }
    if (utt == nullptr) throw ValidationError("no utterance '" + dec_utt + "' in corpus");
    const DecodeResult r =
        beam_search(l.ckpt.params, utt->features, search_options(l.ckpt, l.settings));
    std::printf("utterance %s\nreference  %s\nhypothesis %s\n", utt->id().c_str(),
                utt->transcript.c_str(), decode(r.labels, l.inventory).c_str());
    std::printf("score %.6f (model %.6f, lm %.6f, coverage %.0f), forced ends %zu\n",
                r.best.score, r.best.score_model, r.best.score_lm, r.best.coverage,
                r.forced_end);
    std::string units;
    for (TokenId t : r.best.tokens) units += (units.empty() ? "" : " ") + l.inventory.unit(t);
    std::printf("units %s\n", units.c_str());
    if (dump_targets_flag) {
      if (l.ckpt.mode != ModelMode::kNt) throw ConfigError("--dump-targets needs an NT checkpoint");
      std::printf("%s", dump_targets(utterance_targets(*utt, l.inventory, l.ckpt.window.W,
                                                       l.ckpt.max_per_block),
                                     l.inventory)
                            .c_str());
    }
    if (!dump_attention.empty()) {
      write_file(dump_attention, attention_csv(r.attention));
      std::printf("attention %zux%zu -> %s\n", r.attention.rows, r.attention.cols,
                  dump_attention.c_str());
    }
  } else if (*rec) {
    std::vector<std::string> names{recipe_name};
    if (recipe_name == "all") names = recipe_names();
    ro.log = [](const std::string &m) { std::fprintf(stderr, "%s\n", m.c_str()); };
    const std::string out_dir = recipe_out.empty() ? ro.work_dir : recipe_out;
    std::filesystem::create_directories(out_dir);
    for (const auto &n : names) {
      const RecipeReport r = run_recipe(n, ro);
      write_file(out_dir + "/" + n + ".csv", r.csv());
      write_file(out_dir + "/" + n + ".txt", r.summary());
      std::printf("%s%s\n", r.csv().c_str(), r.summary().c_str());
    }
  } else if (*gc) {
    std::vector<ModelMode> modes;
    if (gc_mode == "both") {
      modes = {ModelMode::kLas, ModelMode::kNt};
    } else {
      modes = {parse_model_mode(gc_mode)};
    }
    gco.seed = gc_seed;
    bool ok = true;
    for (ModelMode m : modes) {
      const GradCheckReport r = model_grad_check(m, make_toy_problem(gc_seed, gc_heads), gco);
      std::printf("%s: %s\n", std::string(model_mode_name(m)).c_str(), r.summary().c_str());
      ok = ok && r.passed;
    }
    return ok ? 0 : 2;
  }
  return 0;
}

}  // namespace
}  // namespace ntkit

int main(int argc, char **argv) {
  try {
    return ntkit::run(argc, argv);
  } catch (const ntkit::Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_validation() ? 1 : 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
