// ntkit/src/lm/ngram.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/lm/ngram.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

namespace {

NGramLM::Context tail(const std::vector<TokenId> &history, std::size_t n) {
  NGramLM::Context ctx(n, SubwordInventory::kSos);
  const std::size_t take = std::min(n, history.size());
  std::copy(history.end() - take, history.end(), ctx.end() - take);
  return ctx;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double NGramLM::log_prob(const std::vector<TokenId> &history,
                         TokenId next) const {
  if (next < 0 || static_cast<std::size_t>(next) >= vocab_size_) {
    throw LabelError("LM query token " + std::to_string(next) +
                     " outside vocabulary of " + std::to_string(vocab_size_));
  }
  return context_log_prob(tail(history, order_ - 1), next);
}

double NGramLM::context_log_prob(Context ctx, TokenId next) const {
  double acc = 0.0;
  while (true) {
    auto it = contexts_.find(ctx);
    if (it != contexts_.end()) {
      auto hit = it->second.log_probs.find(next);
      if (hit != it->second.log_probs.end()) return acc + hit->second;
      acc += it->second.log_backoff;
    }
    if (ctx.empty()) break;
    ctx.erase(ctx.begin());
  }
  return acc - std::log(static_cast<double>(vocab_size_));
}

NGramLM train_ngram(const std::vector<std::vector<TokenId>> &sequences,
                    std::size_t order, std::size_t vocab_size) {
  if (order == 0) throw ConfigError("LM order must be >= 1");
  if (vocab_size == 0) throw ConfigError("LM vocabulary is empty");
  // counts[context][token]
  std::map<NGramLM::Context, std::map<TokenId, double>> counts;
  std::size_t events = 0;
  for (const auto &seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const TokenId w = seq[i];
      if (w < 0 || static_cast<std::size_t>(w) >= vocab_size) {
        throw LabelError("LM training token " + std::to_string(w) +
                         " outside vocabulary of " + std::to_string(vocab_size));
      }
      const std::vector<TokenId> history(seq.begin(), seq.begin() + i);
      for (std::size_t n = 0; n < order; ++n) counts[tail(history, n)][w] += 1.0;
      ++events;
    }
  }
  if (events == 0) throw ConfigError("LM training corpus is empty");

  NGramLM lm(order, vocab_size);
  auto &contexts = lm.mutable_contexts();
  // Shorter contexts first, so each level can read its lower-order estimate.
  for (std::size_t n = 0; n < order; ++n) {
    for (const auto &[ctx, succ] : counts) {
      if (ctx.size() != n) continue;
      double total = 0.0;
      for (const auto &[w, c] : succ) total += c;
      const double types = static_cast<double>(succ.size());
      NGramLM::Entry entry;
      entry.log_backoff = std::log(types / (total + types));
      for (const auto &[w, c] : succ) {
        const NGramLM::Context lower(ctx.begin() + (n > 0 ? 1 : 0), ctx.end());
        const double p_lower =
            n == 0 ? 1.0 / static_cast<double>(vocab_size)
                   : std::exp(lm.context_log_prob(lower, w));
        entry.log_probs[w] = std::log((c + types * p_lower) / (total + types));
      }
      contexts[ctx] = std::move(entry);
    }
  }
  return lm;
}

double lm_logprob(const NGramLM &lm, const std::vector<TokenId> &history,
                  TokenId next) {
  return lm.log_prob(history, next);
}

std::string NGramLM::serialize() const {
  // Every stored context and every seen n-gram becomes one line of its order.
  std::vector<std::map<Context, std::pair<double, double>>> lines(order_ + 1);
  const double none = -std::numeric_limits<double>::infinity();
  for (const auto &[ctx, entry] : contexts_) {
    for (const auto &[w, lp] : entry.log_probs) {
      Context g = ctx;
      g.push_back(w);
      lines[g.size()][g] = {lp, 0.0};
    }
  }
  for (const auto &[ctx, entry] : contexts_) {
    if (ctx.empty()) continue;
    auto [it, fresh] = lines[ctx.size()].try_emplace(ctx, none, 0.0);
    it->second.second = entry.log_backoff;
  }
  std::ostringstream out;
  out << "\\data\\\norder=" << order_ << "\nvocab=" << vocab_size_ << "\n";
  const auto root = contexts_.find(Context{});
  out << "backoff0=" << fmt(root == contexts_.end() ? 0.0 : root->second.log_backoff)
      << "\n";
  for (std::size_t k = 1; k <= order_; ++k) {
    out << "ngram " << k << "=" << lines[k].size() << "\n";
  }
  for (std::size_t k = 1; k <= order_; ++k) {
    out << "\n\\" << k << "-grams:\n";
    for (const auto &[g, v] : lines[k]) {
      std::vector<std::string> ids;
      for (TokenId t : g) ids.push_back(std::to_string(t));
      out << fmt(v.first) << "\t" << join(ids, " ") << "\t" << fmt(v.second) << "\n";
    }
  }
  out << "\n\\end\\\n";
  return out.str();
}

NGramLM NGramLM::parse(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };
  auto fail = [&](const std::string &why) {
    throw ParseError("LM line " + std::to_string(line_no) + ": " + why);
  };
  auto value_of = [&](const std::string &key) -> std::string {
    if (!next() || line.rfind(key + "=", 0) != 0) fail("expected " + key + "=");
    return line.substr(key.size() + 1);
  };
  if (!next() || line != "\\data\\") fail("missing \\data\\ header");
  std::size_t order = 0, vocab = 0;
  double root_bow = 0.0;
  try {
    order = std::stoul(value_of("order"));
    vocab = std::stoul(value_of("vocab"));
    root_bow = std::stod(value_of("backoff0"));
  } catch (const std::invalid_argument &) {
    fail("bad number");
  }
  if (order == 0 || vocab == 0) fail("order and vocab must be >= 1");
  std::vector<std::size_t> expected(order + 1);
  for (std::size_t k = 1; k <= order; ++k) {
    const std::string prefix = "ngram " + std::to_string(k) + "=";
    if (!next() || line.rfind(prefix, 0) != 0) fail("expected '" + prefix + "'");
    expected[k] = std::stoul(line.substr(prefix.size()));
  }
  NGramLM lm(order, vocab);
  lm.contexts_[Context{}].log_backoff = root_bow;
  for (std::size_t k = 1; k <= order; ++k) {
    if (!next() || line != "\\" + std::to_string(k) + "-grams:") {
      fail("expected \\" + std::to_string(k) + "-grams:");
    }
    for (std::size_t i = 0; i < expected[k]; ++i) {
      if (!next()) fail("truncated " + std::to_string(k) + "-gram block");
      const auto parts = [&] {
        std::vector<std::string> p;
        std::size_t s = 0, t;
        while ((t = line.find('\t', s)) != std::string::npos) {
          p.push_back(line.substr(s, t - s));
          s = t + 1;
        }
        p.push_back(line.substr(s));
        return p;
      }();
      if (parts.size() != 3) fail("expected logprob<TAB>ngram<TAB>backoff");
      Context g;
      for (const auto &id : split_words(parts[1])) {
        const long v = std::strtol(id.c_str(), nullptr, 10);
        if (v < 0 || static_cast<std::size_t>(v) >= vocab) fail("token id out of range");
        g.push_back(static_cast<TokenId>(v));
      }
      if (g.size() != k) fail("n-gram length differs from block order");
      const double lp = std::strtod(parts[0].c_str(), nullptr);
      const double bow = std::strtod(parts[2].c_str(), nullptr);
      if (lp > 0.0 || bow > 0.0) fail("log-probabilities must be <= 0");
      if (!std::isinf(lp)) {
        Context ctx(g.begin(), g.end() - 1);
        lm.contexts_[ctx].log_probs[g.back()] = lp;
      }
      if (k < order && (std::isinf(lp) || bow != 0.0)) {
        lm.contexts_[g].log_backoff = bow;
      }
    }
  }
  if (!next() || line != "\\end\\") fail("missing \\end\\");
  return lm;
}

void NGramLM::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write LM '" + path + "'");
  out << serialize();
}

NGramLM NGramLM::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open LM '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void FusionWeights::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("fusion lambda must be >= 0");
  if (!(eta >= 0.0)) throw ConfigError("fusion eta must be >= 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("fusion beta must be in (0, 1)");
}

double fused_score(double model_lp, double lm_lp, double coverage,
                   const FusionWeights &w) {
  return model_lp + w.lambda * lm_lp + w.eta * coverage;
}

}  // namespace ntkit
