// ntkit/src/models/model.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/models/model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/numerics/loss.h"
#include "ntkit/text.h"

namespace ntkit {

std::string_view model_mode_name(ModelMode mode) {
  return mode == ModelMode::kLas ? "las" : "nt";
}

ModelMode parse_model_mode(std::string_view name) {
  if (name == "las") return ModelMode::kLas;
  if (name == "nt") return ModelMode::kNt;
  throw ConfigError("unknown model mode '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Config

void ModelConfig::validate() const {
  const std::pair<const char *, std::size_t> sizes[] = {
      {"input_dim", input_dim},         {"encoder_layers", encoder_layers},
      {"encoder_width", encoder_width}, {"decoder_layers", decoder_layers},
      {"decoder_width", decoder_width}, {"embed_dim", embed_dim},
      {"heads", heads},                 {"vocab_size", vocab_size}};
  for (const auto &[name, v] : sizes) {
    if (v == 0) throw ConfigError(std::string("model ") + name + " must be >= 1");
  }
  if (vocab_size <= SubwordInventory::kUnk) {
    throw ConfigError("model vocab_size must include the special units");
  }
  const std::size_t a = resolved_attention_dim();
  if (a % heads != 0 || encoder_width % heads != 0) {
    throw ConfigError("attention dim " + std::to_string(a) + " and encoder width " +
                      std::to_string(encoder_width) + " must divide into " +
                      std::to_string(heads) + " heads");
  }
}

std::string ModelConfig::to_string() const {
  std::ostringstream out;
  out << "input_dim=" << input_dim << " encoder_layers=" << encoder_layers
      << " encoder_width=" << encoder_width
      << " decoder_layers=" << decoder_layers
      << " decoder_width=" << decoder_width << " embed_dim=" << embed_dim
      << " attention_dim=" << resolved_attention_dim() << " heads=" << heads
      << " vocab_size=" << vocab_size;
  return out.str();
}

ModelConfig ModelConfig::from_string(const std::string &text) {
  std::map<std::string, std::size_t *> fields;
  ModelConfig c;
  fields["input_dim"] = &c.input_dim;
  fields["encoder_layers"] = &c.encoder_layers;
  fields["encoder_width"] = &c.encoder_width;
  fields["decoder_layers"] = &c.decoder_layers;
  fields["decoder_width"] = &c.decoder_width;
  fields["embed_dim"] = &c.embed_dim;
  fields["attention_dim"] = &c.attention_dim;
  fields["heads"] = &c.heads;
  fields["vocab_size"] = &c.vocab_size;
  for (const auto &kv : split_words(text)) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("bad model field '" + kv + "'");
    auto it = fields.find(kv.substr(0, eq));
    if (it == fields.end()) throw ParseError("unknown model field '" + kv + "'");
    try {
      *it->second = std::stoul(kv.substr(eq + 1));
    } catch (const std::exception &) {
      throw ParseError("bad model field '" + kv + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Params

ModelParams::ModelParams(const ModelConfig &cfg) : config(cfg) {
  cfg.validate();
  config.attention_dim = cfg.resolved_attention_dim();
  for (std::size_t l = 0; l < cfg.encoder_layers; ++l) {
    encoder.emplace_back(l == 0 ? cfg.input_dim : cfg.encoder_width,
                         cfg.encoder_width);
  }
  attention = AttentionParams(cfg.decoder_width, cfg.encoder_width,
                              cfg.resolved_attention_dim());
  embedding = Tensor2(cfg.vocab_size, cfg.embed_dim);
  for (std::size_t l = 0; l < cfg.decoder_layers; ++l) {
    decoder.emplace_back(
        l == 0 ? cfg.embed_dim + cfg.encoder_width : cfg.decoder_width,
        cfg.decoder_width);
  }
  out_w = Tensor2(cfg.vocab_size, cfg.decoder_width + cfg.encoder_width);
  out_b = Tensor2(cfg.vocab_size, 1);
}

void ModelParams::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto &l : encoder) l.init(rng);
  attention.init(rng);
  fill_uniform(embedding, 0.05, rng);
  for (auto &l : decoder) l.init(rng);
  fill_uniform(out_w, 0.05, rng);
  out_b.set_zero();
}

void ModelParams::for_each_tensor(
    const std::function<void(const std::string &, Tensor2 &)> &fn) {
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    const std::string p = "encoder." + std::to_string(l) + ".";
    fn(p + "wx", encoder[l].wx);
    fn(p + "wh", encoder[l].wh);
    fn(p + "bias", encoder[l].bias);
  }
  fn("attention.wq", attention.wq);
  fn("attention.wk", attention.wk);
  fn("attention.v", attention.v);
  fn("embedding", embedding);
  for (std::size_t l = 0; l < decoder.size(); ++l) {
    const std::string p = "decoder." + std::to_string(l) + ".";
    fn(p + "wx", decoder[l].wx);
    fn(p + "wh", decoder[l].wh);
    fn(p + "bias", decoder[l].bias);
  }
  fn("output.w", out_w);
  fn("output.b", out_b);
}

void ModelParams::for_each_tensor(
    const std::function<void(const std::string &, const Tensor2 &)> &fn) const {
  const_cast<ModelParams *>(this)->for_each_tensor(
      [&](const std::string &name, Tensor2 &t) { fn(name, t); });
}

std::size_t ModelParams::num_params() const {
  std::size_t n = 0;
  for_each_tensor([&](const std::string &, const Tensor2 &t) { n += t.size(); });
  return n;
}

Vec ModelParams::flatten() const {
  Vec out;
  out.reserve(num_params());
  for_each_tensor([&](const std::string &, const Tensor2 &t) {
    out.insert(out.end(), t.data.begin(), t.data.end());
  });
  return out;
}

void ModelParams::unflatten(std::span<const double> flat) {
  require_dim(flat.size(), num_params(), "flat parameter vector");
  std::size_t off = 0;
  for_each_tensor([&](const std::string &, Tensor2 &t) {
    std::copy(flat.begin() + off, flat.begin() + off + t.size(), t.data.begin());
    off += t.size();
  });
}

std::string ModelParams::param_name(std::size_t flat_index) const {
  std::string out;
  std::size_t off = 0;
  for_each_tensor([&](const std::string &name, const Tensor2 &t) {
    if (out.empty() && flat_index < off + t.size()) {
      const std::size_t i = flat_index - off;
      out = name + "[" + std::to_string(i / t.cols) + "," +
            std::to_string(i % t.cols) + "]";
    }
    off += t.size();
  });
  return out.empty() ? "param#" + std::to_string(flat_index) : out;
}

void ModelParams::validate_shapes() const {
  config.validate();
  const ModelParams ref(config);
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> want, got;
  ref.for_each_tensor([&](const std::string &n, const Tensor2 &t) {
    want.push_back({n, {t.rows, t.cols}});
  });
  for_each_tensor([&](const std::string &n, const Tensor2 &t) {
    got.push_back({n, {t.rows, t.cols}});
    if (t.data.size() != t.rows * t.cols) {
      throw ShapeError("parameter " + n + " has inconsistent storage");
    }
  });
  if (want.size() != got.size()) {
    throw ShapeError("parameter record has " + std::to_string(got.size()) +
                     " tensors, config implies " + std::to_string(want.size()));
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i] != got[i]) {
      throw ShapeError("parameter " + got[i].first + " is " +
                       std::to_string(got[i].second.first) + "x" +
                       std::to_string(got[i].second.second) + ", expected " +
                       std::to_string(want[i].second.first) + "x" +
                       std::to_string(want[i].second.second));
    }
  }
}

// ---------------------------------------------------------------------------
// Windows

FrameRange attention_window(std::size_t block, const WindowSpec &spec,
                            std::size_t num_frames) {
  const std::size_t B = num_blocks(num_frames, spec.W);
  if (block < 1 || block > B) {
    throw ConfigError("block " + std::to_string(block) + " outside 1.." +
                      std::to_string(B));
  }
  // k = 0 and k = 1 both mean the current block alone.
  const std::size_t k = std::max<std::size_t>(spec.k, 1);
  FrameRange r;
  r.first = block > k ? (block - k) * spec.W + 1 : 1;
  r.last = std::min(num_frames, block * spec.W + spec.lookahead);
  return r;
}

int latency_ms(const WindowSpec &spec) {
  return static_cast<int>(spec.W + spec.lookahead) * spec.frame_ms;
}

// ---------------------------------------------------------------------------
// Forward

namespace {

using EncoderCache = std::vector<std::vector<LstmCache>>;  // [layer][t]

Tensor2 run_encoder(const ModelParams &params, const FeatureSequence &x,
                    EncoderCache *cache) {
  const std::size_t T = x.num_frames();
  if (T == 0) throw ValidationError("empty utterance '" + x.utterance_id + "'");
  require_dim(x.dim(), params.config.input_dim, "feature width");
  Tensor2 below = x.frames;
  if (cache) cache->assign(params.encoder.size(), std::vector<LstmCache>(T));
  for (std::size_t l = 0; l < params.encoder.size(); ++l) {
    const LstmLayer &layer = params.encoder[l];
    Tensor2 out(T, layer.hidden());
    LstmState state(layer.hidden());
    for (std::size_t t = 0; t < T; ++t) {
      state = lstm_step_cached(layer, below.row(t), {}, state,
                               cache ? &(*cache)[l][t] : nullptr);
      std::copy(state.hidden.begin(), state.hidden.end(), out.row(t).begin());
    }
    below = std::move(out);
  }
  return below;
}

struct StepCache {
  AttentionCache attn;
  AttentionContext ctx;
  std::vector<LstmCache> layers;
  Vec top_hidden;
};

StepOutput step_impl(const ModelParams &params, const EncodedUtterance &enc,
                     const DecoderState &state, TokenId previous,
                     std::size_t begin, std::size_t end, StepCache *cache) {
  const ModelConfig &cfg = params.config;
  if (previous < 0 || static_cast<std::size_t>(previous) >= cfg.vocab_size) {
    throw LabelError("previous token " + std::to_string(previous) +
                     " outside vocabulary of " + std::to_string(cfg.vocab_size));
  }
  if (end > enc.states.rows) {
    throw ShapeError("attention window end " + std::to_string(end) +
                     " beyond " + std::to_string(enc.states.rows) + " frames");
  }
  StepOutput out;
  out.attention = attend_window(params.attention, cfg.heads,
                                state.layers.back().hidden, enc.projected_keys,
                                enc.states, begin, end,
                                cache ? &cache->attn : nullptr);
  out.next.layers.resize(params.decoder.size());
  if (cache) cache->layers.resize(params.decoder.size());
  for (std::size_t l = 0; l < params.decoder.size(); ++l) {
    LstmCache *lc = cache ? &cache->layers[l] : nullptr;
    if (l == 0) {
      out.next.layers[0] =
          lstm_step_cached(params.decoder[0], params.embedding.row(previous),
                           out.attention.context, state.layers[0], lc);
    } else {
      out.next.layers[l] = lstm_step_cached(
          params.decoder[l], out.next.layers[l - 1].hidden, {}, state.layers[l], lc);
    }
  }
  const Vec &top = out.next.layers.back().hidden;
  Vec logits(params.out_b.data);
  matvec_acc_cols(params.out_w, 0, top, logits);
  matvec_acc_cols(params.out_w, cfg.decoder_width, out.attention.context, logits);
  out.log_probs = log_softmax(logits);
  if (cache) {
    cache->ctx = out.attention;
    cache->top_hidden = top;
  }
  return out;
}

struct Step {
  TokenId previous;
  TokenId target;
  std::size_t begin;
  std::size_t end;
  std::size_t block;
};

std::vector<Step> nt_steps(const FeatureSequence &x, const BlockTargets &bt,
                           const WindowSpec &spec) {
  const std::size_t T = x.num_frames();
  if (bt.W != spec.W || bt.B != num_blocks(T, spec.W) ||
      bt.per_block.size() != bt.B) {
    throw ValidationError("block targets (W=" + std::to_string(bt.W) + ", B=" +
                          std::to_string(bt.B) + ") do not match T=" +
                          std::to_string(T) + ", W=" + std::to_string(spec.W));
  }
  std::vector<Step> steps;
  TokenId prev = SubwordInventory::kSos;
  for (std::size_t b = 0; b < bt.B; ++b) {
    const FrameRange r = attention_window(b + 1, spec, T);
    for (TokenId y : bt.per_block[b]) {
      steps.push_back({prev, y, r.first - 1, r.last, b});
      prev = y;
    }
  }
  return steps;
}

std::vector<Step> las_steps(const FeatureSequence &x,
                            const std::vector<TokenId> &targets) {
  std::vector<Step> steps;
  TokenId prev = SubwordInventory::kSos;
  for (TokenId y : targets) {
    steps.push_back({prev, y, 0, x.num_frames(), 0});
    prev = y;
  }
  return steps;
}

void check_target(const ModelParams &params, TokenId y) {
  if (y < 0 || static_cast<std::size_t>(y) >= params.config.vocab_size) {
    throw LabelError("target token " + std::to_string(y) +
                     " outside vocabulary of " +
                     std::to_string(params.config.vocab_size));
  }
}

ForwardResult run_forward(const ModelParams &params, const FeatureSequence &x,
                          const std::vector<Step> &steps) {
  if (steps.empty()) throw ValidationError("empty target sequence");
  const EncodedUtterance enc = encode_for_attention(params, x);
  ForwardResult res;
  DecoderState state = initial_decoder_state(params);
  double total = 0.0;
  for (const Step &s : steps) {
    check_target(params, s.target);
    StepOutput o = step_impl(params, enc, state, s.previous, s.begin, s.end, nullptr);
    const double lp = o.log_probs[s.target];
    total -= lp;
    res.token_log_probs.push_back(lp);
    res.distributions.push_back(std::move(o.log_probs));
    res.attention.push_back(std::move(o.attention.weights));
    res.window_begin.push_back(s.begin);
    res.block_of_step.push_back(s.block);
    state = std::move(o.next);
  }
  res.loss = total / static_cast<double>(steps.size());
  return res;
}

void add_into(Tensor2 &dst, const Tensor2 &src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

GradientResult run_gradients(const ModelParams &params, const FeatureSequence &x,
                             const std::vector<Step> &steps) {
  if (steps.empty()) throw ValidationError("empty target sequence");
  const ModelConfig &cfg = params.config;
  const std::size_t T = x.num_frames();
  const std::size_t N = steps.size();

  EncoderCache enc_cache;
  EncodedUtterance enc;
  enc.states = run_encoder(params, x, &enc_cache);
  enc.projected_keys = project_keys(params.attention, enc.states);

  std::vector<StepCache> caches(N);
  std::vector<Vec> probs(N);
  DecoderState state = initial_decoder_state(params);
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const Step &s = steps[i];
    check_target(params, s.target);
    StepOutput o = step_impl(params, enc, state, s.previous, s.begin, s.end, &caches[i]);
    total -= o.log_probs[s.target];
    probs[i] = std::move(o.log_probs);
    state = std::move(o.next);
  }

  GradientResult res;
  res.loss = total / static_cast<double>(N);
  res.num_tokens = N;
  res.grads = ModelParams(cfg);

  const std::size_t L = params.decoder.size();
  const std::size_t Hd = cfg.decoder_width;
  const std::size_t He = cfg.encoder_width;
  std::vector<LstmGrads> dec_grads;
  for (const auto &l : params.decoder) dec_grads.emplace_back(l, true);
  AttentionGrads attn_grads(params.attention);
  Tensor2 d_pk(T, cfg.resolved_attention_dim());
  Tensor2 d_states(T, He);
  std::vector<Vec> dh(L, Vec(Hd, 0.0)), dc(L, Vec(Hd, 0.0));
  Vec d_logits(cfg.vocab_size), d_out(Hd + He), d_ctx(He), d_in0(cfg.embed_dim + He);
  Vec d_below(Hd), d_query(Hd), d_prev_h, d_prev_c;
  const double scale = 1.0 / static_cast<double>(N);

  for (std::size_t i = N; i-- > 0;) {
    const Step &s = steps[i];
    StepCache &c = caches[i];
    for (std::size_t v = 0; v < cfg.vocab_size; ++v) {
      d_logits[v] = std::exp(probs[i][v]) * scale;
    }
    d_logits[s.target] -= scale;
    for (std::size_t v = 0; v < cfg.vocab_size; ++v) {
      res.grads.out_b.data[v] += d_logits[v];
    }
    outer_acc(d_logits, c.top_hidden, 0, res.grads.out_w);
    outer_acc(d_logits, c.ctx.context, Hd, res.grads.out_w);
    std::fill(d_out.begin(), d_out.end(), 0.0);
    matvec_t_acc(params.out_w, d_logits, d_out);
    for (std::size_t j = 0; j < Hd; ++j) dh[L - 1][j] += d_out[j];
    std::copy(d_out.begin() + Hd, d_out.end(), d_ctx.begin());

    for (std::size_t l = L; l-- > 0;) {
      if (l > 0) {
        std::fill(d_below.begin(), d_below.end(), 0.0);
        lstm_backward(params.decoder[l], c.layers[l], dh[l], dc[l], dec_grads[l],
                      d_below, d_prev_h, d_prev_c);
        for (std::size_t j = 0; j < Hd; ++j) dh[l - 1][j] += d_below[j];
      } else {
        std::fill(d_in0.begin(), d_in0.end(), 0.0);
        lstm_backward(params.decoder[0], c.layers[0], dh[0], dc[0], dec_grads[0],
                      d_in0, d_prev_h, d_prev_c);
        auto emb = res.grads.embedding.row(s.previous);
        for (std::size_t j = 0; j < cfg.embed_dim; ++j) emb[j] += d_in0[j];
        for (std::size_t j = 0; j < He; ++j) d_ctx[j] += d_in0[cfg.embed_dim + j];
      }
      dh[l].swap(d_prev_h);
      dc[l].swap(d_prev_c);
    }

    std::fill(d_query.begin(), d_query.end(), 0.0);
    attention_backward(params.attention, cfg.heads, c.attn, c.ctx, enc.states,
                       d_ctx, attn_grads, d_query, d_pk, d_states);
    for (std::size_t j = 0; j < Hd; ++j) dh[L - 1][j] += d_query[j];
  }

  project_keys_backward(params.attention, enc.states, d_pk, attn_grads, d_states);

  // Encoder, top layer down.
  Tensor2 d_top = std::move(d_states);
  for (std::size_t l = params.encoder.size(); l-- > 0;) {
    const LstmLayer &layer = params.encoder[l];
    const std::size_t H = layer.hidden();
    LstmGrads g(layer, true);
    Tensor2 d_input(T, layer.input_dim());
    Vec rh(H, 0.0), rc(H, 0.0), d_hidden(H);
    for (std::size_t t = T; t-- > 0;) {
      const auto top_row = d_top.row(t);
      for (std::size_t j = 0; j < H; ++j) d_hidden[j] = top_row[j] + rh[j];
      // Layer 0 also yields feature gradients; they are simply dropped.
      lstm_backward(layer, enc_cache[l][t], d_hidden, rc, g, d_input.row(t),
                    d_prev_h, d_prev_c);
      rh.swap(d_prev_h);
      rc.swap(d_prev_c);
    }
    g.flush();
    res.grads.encoder[l].wx = std::move(g.wx);
    res.grads.encoder[l].wh = std::move(g.wh);
    res.grads.encoder[l].bias = std::move(g.bias);
    d_top = std::move(d_input);
  }

  for (std::size_t l = 0; l < L; ++l) {
    dec_grads[l].flush();
    add_into(res.grads.decoder[l].wx, dec_grads[l].wx);
    add_into(res.grads.decoder[l].wh, dec_grads[l].wh);
    add_into(res.grads.decoder[l].bias, dec_grads[l].bias);
  }
  res.grads.attention.wq = std::move(attn_grads.wq);
  res.grads.attention.wk = std::move(attn_grads.wk);
  res.grads.attention.v = std::move(attn_grads.v);
  return res;
}

}  // namespace

Tensor2 encode_utterance(const ModelParams &params, const FeatureSequence &x) {
  return run_encoder(params, x, nullptr);
}

EncodedUtterance encode_for_attention(const ModelParams &params,
                                      const FeatureSequence &x) {
  EncodedUtterance enc;
  enc.states = run_encoder(params, x, nullptr);
  enc.projected_keys = project_keys(params.attention, enc.states);
  return enc;
}

DecoderState initial_decoder_state(const ModelParams &params) {
  DecoderState s;
  for (const auto &l : params.decoder) s.layers.emplace_back(l.hidden());
  return s;
}

StepOutput decoder_step(const ModelParams &params, const EncodedUtterance &enc,
                        const DecoderState &state, TokenId previous,
                        std::size_t begin, std::size_t end) {
  return step_impl(params, enc, state, previous, begin, end, nullptr);
}

ForwardResult nt_forward(const ModelParams &params, const FeatureSequence &x,
                         const BlockTargets &targets, const WindowSpec &spec) {
  return run_forward(params, x, nt_steps(x, targets, spec));
}

ForwardResult las_forward(const ModelParams &params, const FeatureSequence &x,
                          const std::vector<TokenId> &targets) {
  return run_forward(params, x, las_steps(x, targets));
}

GradientResult nt_gradients(const ModelParams &params, const FeatureSequence &x,
                            const BlockTargets &targets, const WindowSpec &spec) {
  return run_gradients(params, x, nt_steps(x, targets, spec));
}

GradientResult las_gradients(const ModelParams &params, const FeatureSequence &x,
                             const std::vector<TokenId> &targets) {
  return run_gradients(params, x, las_steps(x, targets));
}

ModelParams transfer_from_las(const ModelParams &las_params) {
  try {
    las_params.validate_shapes();
  } catch (const Error &e) {
    throw TransferError(std::string("cannot transfer LAS parameters: ") + e.what());
  }
  ModelParams nt = las_params;
  return nt;
}

ModelParams transfer_from_las(const ModelParams &las_params,
                              const ModelConfig &nt_config) {
  ModelConfig want = nt_config;
  want.attention_dim = want.resolved_attention_dim();
  if (!(las_params.config == want)) {
    throw TransferError("LAS config {" + las_params.config.to_string() +
                        "} differs from NT config {" + nt_config.to_string() + "}");
  }
  return transfer_from_las(las_params);
}

}  // namespace ntkit
