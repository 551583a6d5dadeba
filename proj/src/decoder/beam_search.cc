// ntkit/src/decoder/beam_search.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/decoder/beam_search.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "ntkit/error.h"

namespace ntkit {

void update_coverage(Vec &attn_history, std::span<const double> weights,
                     std::size_t offset) {
  if (offset + weights.size() > attn_history.size()) {
    throw ShapeError("attention weights beyond the coverage history");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) attn_history[offset + i] += weights[i];
}

std::size_t coverage(const Vec &attn_history, double beta) {
  return static_cast<std::size_t>(std::count_if(
      attn_history.begin(), attn_history.end(), [&](double m) { return m > beta; }));
}

bool better(const BeamEntry &a, const BeamEntry &b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
  return a.tokens < b.tokens;
}

std::string attention_csv(const Tensor2 &attention) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < attention.rows; ++r) {
    for (std::size_t c = 0; c < attention.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.6g", attention(r, c));
      if (c > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

struct Plan {
  std::vector<std::pair<std::size_t, std::size_t>> windows;  // [begin, end)
  TokenId end_token = SubwordInventory::kEpsilon;
  std::vector<TokenId> emittable;
  std::size_t cap = 0;
  bool fusion = false;
};

Plan make_plan(const ModelParams &params, const FeatureSequence &x,
               const SearchOptions &opt) {
  const std::size_t T = x.num_frames();
  if (T == 0) throw ValidationError("cannot decode empty utterance '" + x.utterance_id + "'");
  if (opt.beam == 0) throw ConfigError("beam width must be >= 1");
  Plan plan;
  if (opt.mode == ModelMode::kNt) {
    if (opt.max_per_block == 0) throw ConfigError("cap M must be >= 1");
    const std::size_t B = num_blocks(T, opt.window.W);
    for (std::size_t b = 1; b <= B; ++b) {
      const FrameRange r = attention_window(b, opt.window, T);
      plan.windows.emplace_back(r.first - 1, r.last);
    }
    plan.end_token = SubwordInventory::kEpsilon;
    plan.cap = opt.max_per_block;
  } else {
    if (opt.max_len == 0) throw ConfigError("LAS decoding needs max_len >= 1");
    plan.windows.emplace_back(0, T);
    plan.end_token = SubwordInventory::kEos;
    plan.cap = opt.max_len;
  }
  for (std::size_t v = 0; v < params.config.vocab_size; ++v) {
    const auto t = static_cast<TokenId>(v);
    if (t != SubwordInventory::kEpsilon && t != SubwordInventory::kSos &&
        t != SubwordInventory::kEos) {
      plan.emittable.push_back(t);
    }
  }
  if (opt.lm != nullptr) {
    opt.fusion.validate();
    if (opt.lm->vocab_size() != params.config.vocab_size) {
      throw ConfigError("LM vocabulary " + std::to_string(opt.lm->vocab_size()) +
                        " differs from model vocabulary " +
                        std::to_string(params.config.vocab_size));
    }
    plan.fusion = true;
  }
  return plan;
}

double fuse(const Plan &plan, const SearchOptions &opt, const BeamEntry &e) {
  return plan.fusion ? fused_score(e.score_model, e.score_lm, e.coverage, opt.fusion)
                     : e.score_model;
}

struct Trace {
  std::shared_ptr<const Trace> parent;
  std::size_t begin = 0;
  Vec weights;
};

struct Hyp {
  BeamEntry entry;
  DecoderState state;
  Vec attn_history;
  std::vector<TokenId> lm_history;
  std::size_t block_count = 0;
  TokenId previous = SubwordInventory::kSos;
  std::shared_ptr<const Trace> trace;
};

Tensor2 attention_matrix(const std::shared_ptr<const Trace> &last, std::size_t T) {
  std::vector<const Trace *> chain;
  for (const Trace *t = last.get(); t != nullptr; t = t->parent.get()) chain.push_back(t);
  Tensor2 m(chain.size(), T);
  for (std::size_t r = 0; r < chain.size(); ++r) {
    const Trace *t = chain[chain.size() - 1 - r];
    for (std::size_t i = 0; i < t->weights.size(); ++i) m(r, t->begin + i) = t->weights[i];
  }
  return m;
}

std::vector<TokenId> strip(const std::vector<TokenId> &tokens, TokenId end) {
  std::vector<TokenId> out;
  for (TokenId t : tokens) {
    if (t != end) out.push_back(t);
  }
  return out;
}

}  // namespace

DecodeResult beam_search(const ModelParams &params, const FeatureSequence &x,
                         const SearchOptions &opt) {
  const Plan plan = make_plan(params, x, opt);
  const std::size_t T = x.num_frames();
  const EncodedUtterance enc = encode_for_attention(params, x);
  const double beta = opt.fusion.beta;

  DecodeResult result;
  std::vector<Hyp> hyps(1);
  hyps[0].state = initial_decoder_state(params);
  hyps[0].attn_history.assign(T, 0.0);

  struct Candidate {
    BeamEntry entry;
    std::size_t parent;  // frontier index, or ended index when carried
    TokenId token;
    bool ended;
    bool carried;
  };

  for (std::size_t b = 0; b < plan.windows.size(); ++b) {
    const auto [begin, end] = plan.windows[b];
    BlockDiagnostics diag;
    diag.block = b;
    std::vector<Hyp> frontier = std::move(hyps);
    for (Hyp &h : frontier) h.block_count = 0;
    std::vector<Hyp> ended;

    while (!frontier.empty()) {
      std::vector<StepOutput> steps;
      steps.reserve(frontier.size());
      std::vector<Candidate> pool;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        const Hyp &h = frontier[i];
        steps.push_back(decoder_step(params, enc, h.state, h.previous, begin, end));
        const StepOutput &s = steps.back();
        const bool forced = h.block_count >= plan.cap;
        if (forced) ++diag.forced_end;

        // Coverage after emitting a label at this step.
        std::size_t cov_gain_base = 0, cov_gain_new = 0;
        for (std::size_t k = 0; k < s.attention.weights.size(); ++k) {
          const double old = h.attn_history[begin + k];
          cov_gain_base += old > beta;
          cov_gain_new += old + s.attention.weights[k] > beta;
        }
        const double label_cov = h.entry.coverage - static_cast<double>(cov_gain_base) +
                                 static_cast<double>(cov_gain_new);

        auto push = [&](TokenId y, bool is_end) {
          Candidate c;
          c.entry.tokens = h.entry.tokens;
          c.entry.tokens.push_back(y);
          c.entry.score_model = h.entry.score_model + s.log_probs[y];
          c.entry.score_lm = h.entry.score_lm;
          c.entry.coverage = h.entry.coverage;
          if (!is_end) {
            if (plan.fusion) c.entry.score_lm += lm_logprob(*opt.lm, h.lm_history, y);
            c.entry.coverage = label_cov;
          }
          c.entry.score = fuse(plan, opt, c.entry);
          c.parent = i;
          c.token = y;
          c.ended = is_end;
          c.carried = false;
          pool.push_back(std::move(c));
        };
        push(plan.end_token, true);
        if (!forced) {
          for (TokenId y : plan.emittable) push(y, false);
        }
      }
      for (std::size_t i = 0; i < ended.size(); ++i) {
        pool.push_back({ended[i].entry, i, plan.end_token, true, true});
      }
      const std::size_t keep = std::min(opt.beam, pool.size());
      std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(),
                        [](const Candidate &a, const Candidate &b) {
                          return better(a.entry, b.entry);
                        });
      pool.resize(keep);

      std::vector<Hyp> next_frontier, next_ended;
      for (Candidate &c : pool) {
        if (c.carried) {
          next_ended.push_back(std::move(ended[c.parent]));
          continue;
        }
        const Hyp &parent = frontier[c.parent];
        const StepOutput &s = steps[c.parent];
        Hyp h;
        h.entry = std::move(c.entry);
        h.state = s.next;
        h.attn_history = parent.attn_history;
        h.lm_history = parent.lm_history;
        h.block_count = parent.block_count;
        h.previous = c.token;
        auto tr = std::make_shared<Trace>();
        tr->parent = parent.trace;
        tr->begin = begin;
        tr->weights = s.attention.weights;
        h.trace = std::move(tr);
        if (c.ended) {
          next_ended.push_back(std::move(h));
        } else {
          update_coverage(h.attn_history, s.attention.weights, begin);
          h.lm_history.push_back(c.token);
          ++h.block_count;
          next_frontier.push_back(std::move(h));
        }
      }
      frontier = std::move(next_frontier);
      ended = std::move(next_ended);
    }

    for (const Hyp &h : ended) diag.beam.push_back(h.entry);
    result.forced_end += diag.forced_end;
    result.blocks.push_back(std::move(diag));
    hyps = std::move(ended);
  }

  const Hyp &best = hyps.front();
  result.best = best.entry;
  result.labels = strip(best.entry.tokens, plan.end_token);
  result.attention = attention_matrix(best.trace, T);
  return result;
}

double count_sequences(const ModelParams &params, const FeatureSequence &x,
                       const SearchOptions &opt) {
  const Plan plan = make_plan(params, x, opt);
  double per_block = 0.0, pw = 1.0;
  for (std::size_t m = 0; m <= plan.cap; ++m) {
    per_block += pw;
    pw *= static_cast<double>(plan.emittable.size());
  }
  return std::pow(per_block, static_cast<double>(plan.windows.size()));
}

DecodeResult exhaustive_decode(const ModelParams &params,
                               const FeatureSequence &x,
                               const SearchOptions &opt, std::size_t limit) {
  const Plan plan = make_plan(params, x, opt);
  const double total = count_sequences(params, x, opt);
  if (total > static_cast<double>(limit)) {
    throw EnumerationError("exhaustive decode would score " + std::to_string(total) +
                           " sequences, limit " + std::to_string(limit));
  }
  const std::size_t T = x.num_frames();
  const std::size_t B = plan.windows.size();
  const double beta = opt.fusion.beta;

  // Every block's possible label lists.
  std::vector<std::vector<TokenId>> choices{{}};
  for (std::size_t len = 1, lo = 0; len <= plan.cap; ++len) {
    const std::size_t hi = choices.size();
    for (std::size_t i = lo; i < hi; ++i) {
      for (TokenId y : plan.emittable) {
        auto c = choices[i];
        c.push_back(y);
        choices.push_back(std::move(c));
      }
    }
    lo = hi;
  }

  DecodeResult best;
  bool have = false;
  std::vector<std::size_t> pick(B, 0);
  while (true) {
    BlockTargets bt;
    bt.W = opt.window.W;
    bt.B = B;
    for (std::size_t b = 0; b < B; ++b) {
      auto blk = choices[pick[b]];
      blk.push_back(plan.end_token);
      bt.flattened.insert(bt.flattened.end(), blk.begin(), blk.end());
      bt.per_block.push_back(std::move(blk));
    }
    const ForwardResult fw = opt.mode == ModelMode::kNt
                                 ? nt_forward(params, x, bt, opt.window)
                                 : las_forward(params, x, bt.flattened);
    BeamEntry e;
    e.tokens = bt.flattened;
    Vec hist(T, 0.0);
    std::vector<TokenId> lm_hist;
    for (std::size_t i = 0; i < e.tokens.size(); ++i) {
      e.score_model += fw.token_log_probs[i];
      if (e.tokens[i] == plan.end_token) continue;
      if (plan.fusion) e.score_lm += lm_logprob(*opt.lm, lm_hist, e.tokens[i]);
      lm_hist.push_back(e.tokens[i]);
      update_coverage(hist, fw.attention[i], fw.window_begin[i]);
    }
    e.coverage = static_cast<double>(coverage(hist, beta));
    e.score = fuse(plan, opt, e);
    if (!have || better(e, best.best)) {
      have = true;
      best.best = e;
      best.attention = Tensor2(fw.attention.size(), T);
      for (std::size_t r = 0; r < fw.attention.size(); ++r) {
        for (std::size_t k = 0; k < fw.attention[r].size(); ++k) {
          best.attention(r, fw.window_begin[r] + k) = fw.attention[r][k];
        }
      }
    }
    std::size_t b = 0;
    while (b < B && ++pick[b] == choices.size()) pick[b++] = 0;
    if (b == B) break;
  }
  best.labels = strip(best.best.tokens, plan.end_token);
  return best;
}

}  // namespace ntkit
