// ntkit/src/tokenizer/inventory.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/tokenizer/inventory.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

std::string_view mode_name(TokenizerMode mode) {
  return mode == TokenizerMode::kGrapheme ? "grapheme" : "wordpiece";
}

TokenizerMode parse_mode(std::string_view name) {
  if (name == "grapheme") return TokenizerMode::kGrapheme;
  if (name == "wordpiece") return TokenizerMode::kWordpiece;
  throw ConfigError("unknown tokenizer mode '" + std::string(name) + "'");
}

namespace {

bool starts_with_marker(std::string_view unit) {
  return unit.size() > kWordMarker.size() &&
         unit.substr(0, kWordMarker.size()) == kWordMarker;
}

}  // namespace

SubwordInventory::SubwordInventory(TokenizerMode mode,
                                   std::vector<std::string> units)
    : mode_(mode), units_(std::move(units)) {
  const std::vector<std::string_view> specials{kEpsilonUnit, kSosUnit,
                                               kEosUnit, kUnkUnit};
  if (units_.size() < specials.size()) {
    throw ValidationError("inventory is missing its special units");
  }
  for (std::size_t i = 0; i < specials.size(); ++i) {
    if (units_[i] != specials[i]) {
      throw ValidationError("inventory unit " + std::to_string(i) +
                            " must be " + std::string(specials[i]));
    }
  }
  if (mode_ == TokenizerMode::kGrapheme &&
      (units_.size() < 5 || units_[4] != kSpaceUnit)) {
    throw ValidationError("grapheme inventory unit 4 must be <sp>");
  }
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const std::string &u = units_[i];
    if (u.empty()) throw ValidationError("empty inventory unit");
    if (!index_.emplace(u, static_cast<TokenId>(i)).second) {
      throw ValidationError("duplicate inventory unit '" + u + "'");
    }
    max_unit_chars_ = std::max(max_unit_chars_, split_utf8(u).size());
  }
}

SubwordInventory SubwordInventory::graphemes(
    const std::vector<std::string> &transcripts) {
  std::set<std::string> chars;
  for (const auto &t : transcripts) {
    for (const auto &w : split_words(t)) {
      for (auto &c : split_utf8(w)) chars.insert(std::move(c));
    }
  }
  std::vector<std::string> units{std::string(kEpsilonUnit),
                                 std::string(kSosUnit), std::string(kEosUnit),
                                 std::string(kUnkUnit),
                                 std::string(kSpaceUnit)};
  units.insert(units.end(), chars.begin(), chars.end());
  return SubwordInventory(TokenizerMode::kGrapheme, std::move(units));
}

std::optional<TokenId> SubwordInventory::find(std::string_view unit) const {
  auto it = index_.find(std::string(unit));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> SubwordInventory::separator() const {
  if (mode_ == TokenizerMode::kGrapheme) return 4;
  return std::nullopt;
}

std::size_t SubwordInventory::num_content_units() const {
  return units_.size() - 4 - (mode_ == TokenizerMode::kGrapheme ? 1 : 0);
}

std::string SubwordInventory::serialize() const {
  std::string out = "mode=" + std::string(mode_name(mode_)) + " version=1\n";
  for (const auto &u : units_) {
    out += u;
    out += '\n';
  }
  return out;
}

SubwordInventory SubwordInventory::parse(const std::string &text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty inventory file");
  const auto fields = split_words(header);
  if (fields.size() != 2 || fields[0].rfind("mode=", 0) != 0 ||
      fields[1] != "version=1") {
    throw ParseError("bad inventory header '" + header + "'");
  }
  const TokenizerMode mode = parse_mode(fields[0].substr(5));
  std::vector<std::string> units;
  std::string line;
  while (std::getline(in, line)) units.push_back(line);
  return SubwordInventory(mode, std::move(units));
}

void SubwordInventory::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write inventory '" + path + "'");
  out << serialize();
}

SubwordInventory SubwordInventory::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open inventory '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string SubwordInventory::hash() const { return hex64(fnv1a64(serialize())); }

namespace {

void encode_word(const std::vector<std::string> &chars,
                 const SubwordInventory &inv, std::vector<TokenId> &out) {
  const bool wordpiece = inv.mode() == TokenizerMode::kWordpiece;
  std::size_t i = 0;
  while (i < chars.size()) {
    const std::string prefix =
        (wordpiece && i == 0) ? std::string(kWordMarker) : std::string();
    const std::size_t max_len = std::min(inv.max_unit_chars(), chars.size() - i);
    std::optional<TokenId> best;
    std::size_t best_len = 0;
    for (std::size_t len = max_len; len >= 1; --len) {
      std::string cand = prefix;
      for (std::size_t k = i; k < i + len; ++k) cand += chars[k];
      if (auto id = inv.find(cand); id && !inv.is_control(*id)) {
        best = id;
        best_len = len;
        break;
      }
    }
    if (best) {
      out.push_back(*best);
      i += best_len;
    } else {
      out.push_back(inv.unk());
      i += 1;
    }
  }
}

}  // namespace

std::vector<std::vector<TokenId>> encode_words(
    const std::vector<std::string> &words, const SubwordInventory &inv) {
  std::vector<std::vector<TokenId>> out;
  out.reserve(words.size());
  for (const auto &w : words) {
    out.emplace_back();
    encode_word(split_utf8(w), inv, out.back());
  }
  return out;
}

std::vector<TokenId> encode(std::string_view text, const SubwordInventory &inv) {
  const auto per_word = encode_words(split_words(text), inv);
  std::vector<TokenId> out;
  for (std::size_t w = 0; w < per_word.size(); ++w) {
    if (w > 0 && inv.separator()) out.push_back(*inv.separator());
    out.insert(out.end(), per_word[w].begin(), per_word[w].end());
  }
  return out;
}

std::string decode(const std::vector<TokenId> &tokens,
                   const SubwordInventory &inv) {
  std::string out;
  bool pending_space = false;
  for (TokenId t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= inv.size() || inv.is_control(t)) {
      continue;
    }
    if (inv.separator() && t == *inv.separator()) {
      pending_space = !out.empty();
      continue;
    }
    const std::string &u = inv.unit(t);
    if (inv.mode() == TokenizerMode::kWordpiece && starts_with_marker(u)) {
      if (!out.empty()) out += ' ';
      out += u.substr(kWordMarker.size());
      pending_space = false;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += u;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wordpiece training

double unigram_log_likelihood(const std::map<std::string, std::size_t> &counts) {
  double total = 0.0;
  for (const auto &[u, c] : counts) total += static_cast<double>(c);
  double ll = 0.0;
  for (const auto &[u, c] : counts) {
    if (c > 0) ll += static_cast<double>(c) * std::log(static_cast<double>(c) / total);
  }
  return ll;
}

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

struct WordType {
  std::vector<std::string> units;
  std::size_t freq = 0;
};

using Pair = std::pair<std::string, std::string>;

std::map<Pair, std::size_t> count_pairs(const std::vector<WordType> &words) {
  std::map<Pair, std::size_t> pairs;
  for (const auto &w : words) {
    const auto &s = w.units;
    std::size_t i = 0;
    while (i + 1 < s.size()) {
      if (s[i] != s[i + 1]) {
        pairs[{s[i], s[i + 1]}] += w.freq;
        ++i;
        continue;
      }
      // A run of identical units merges pairwise from the left.
      std::size_t j = i;
      while (j < s.size() && s[j] == s[i]) ++j;
      const std::size_t run = j - i;
      pairs[{s[i], s[i]}] += w.freq * (run / 2);
      if (j < s.size()) pairs[{s[j - 1], s[j]}] += w.freq;
      i = j;
    }
  }
  return pairs;
}

void apply_merge(std::vector<WordType> &words, const Pair &p,
                 const std::string &merged) {
  for (auto &w : words) {
    std::vector<std::string> out;
    out.reserve(w.units.size());
    std::size_t i = 0;
    while (i < w.units.size()) {
      if (i + 1 < w.units.size() && w.units[i] == p.first &&
          w.units[i + 1] == p.second) {
        out.push_back(merged);
        i += 2;
      } else {
        out.push_back(w.units[i]);
        ++i;
      }
    }
    w.units = std::move(out);
  }
}

}  // namespace

SubwordInventory train_wordpieces(const std::vector<std::string> &transcripts,
                                  std::size_t target_size,
                                  WordpieceTrainingTrace *trace) {
  std::map<std::string, std::size_t> word_freq;
  for (const auto &t : transcripts) {
    for (const auto &w : split_words(t)) ++word_freq[w];
  }
  if (word_freq.empty()) throw ConfigError("wordpiece training: empty corpus");

  std::vector<WordType> words;
  std::set<std::string> base;
  for (const auto &[w, f] : word_freq) {
    WordType wt;
    wt.freq = f;
    const auto chars = split_utf8(w);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      wt.units.push_back(i == 0 ? std::string(kWordMarker) + chars[i] : chars[i]);
      base.insert(wt.units.back());
    }
    words.push_back(std::move(wt));
  }
  if (target_size < base.size()) {
    throw ConfigError("wordpiece target size " + std::to_string(target_size) +
                      " is below the base alphabet size " +
                      std::to_string(base.size()));
  }

  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto &w : words) {
    for (const auto &u : w.units) {
      counts[u] += w.freq;
      total += w.freq;
    }
  }

  std::vector<std::string> units{std::string(kEpsilonUnit),
                                 std::string(kSosUnit), std::string(kEosUnit),
                                 std::string(kUnkUnit)};
  units.insert(units.end(), base.begin(), base.end());
  std::set<std::string> known(base.begin(), base.end());

  if (trace) trace->log_likelihood.push_back(unigram_log_likelihood(counts));

  while (known.size() < target_size) {
    const auto pairs = count_pairs(words);
    const double n_old = static_cast<double>(total);
    double best_gain = 0.0;
    const Pair *best = nullptr;
    std::size_t best_count = 0;
    for (const auto &[p, c] : pairs) {
      if (c == 0) continue;
      const std::string merged = p.first + p.second;
      // Count changes for the units the merge touches.
      std::map<std::string, double> before, after;
      for (const std::string *u : {&p.first, &p.second, &merged}) {
        auto it = counts.find(*u);
        before[*u] = it == counts.end() ? 0.0 : static_cast<double>(it->second);
      }
      after = before;
      after[p.first] -= static_cast<double>(c);
      after[p.second] -= static_cast<double>(c);
      after[merged] += static_cast<double>(c);
      double gain = 0.0;
      for (const auto &[u, b] : before) gain += xlogx(after[u]) - xlogx(b);
      const double n_new = n_old - static_cast<double>(c);
      gain -= xlogx(n_new) - xlogx(n_old);
      // Strictly larger wins; map order makes the first maximum the
      // lexicographically smallest pair.
      if (gain > best_gain) {
        best_gain = gain;
        best = &p;
        best_count = c;
      }
    }
    if (best == nullptr) break;

    const Pair chosen = *best;
    const std::string merged = chosen.first + chosen.second;
    apply_merge(words, chosen, merged);
    counts[chosen.first] -= best_count;
    counts[chosen.second] -= best_count;
    counts[merged] += best_count;
    total -= best_count;
    for (auto it = counts.begin(); it != counts.end();) {
      it = it->second == 0 ? counts.erase(it) : std::next(it);
    }
    if (known.insert(merged).second) units.push_back(merged);
    if (trace) {
      trace->merges.push_back(chosen);
      trace->log_likelihood.push_back(unigram_log_likelihood(counts));
    }
  }
  return SubwordInventory(TokenizerMode::kWordpiece, std::move(units));
}

}  // namespace ntkit
