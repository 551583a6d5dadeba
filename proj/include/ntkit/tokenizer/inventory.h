// ntkit/include/ntkit/tokenizer/inventory.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_TOKENIZER_INVENTORY_H_
#define NTKIT_TOKENIZER_INVENTORY_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ntkit {

using TokenId = int;

enum class TokenizerMode { kGrapheme, kWordpiece };

std::string_view mode_name(TokenizerMode mode);
TokenizerMode parse_mode(std::string_view name);

inline constexpr std::string_view kEpsilonUnit = "<eps>";
inline constexpr std::string_view kSosUnit = "<sos>";
inline constexpr std::string_view kEosUnit = "<eos>";
inline constexpr std::string_view kUnkUnit = "<unk>";
// Grapheme-mode word separator.
inline constexpr std::string_view kSpaceUnit = "<sp>";
// Wordpiece word-start marker.
inline constexpr std::string_view kWordMarker = "_";

// Ordered unit list. Indices 0..3 are always <eps>, <sos>, <eos>, <unk>; in
// grapheme mode index 4 is the word separator.
class SubwordInventory {
 public:
  static constexpr TokenId kEpsilon = 0;
  static constexpr TokenId kSos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;

  SubwordInventory() = default;

  // Validates uniqueness, the special prefix and the wordpiece marker rule.
  SubwordInventory(TokenizerMode mode, std::vector<std::string> units);

  // Specials, separator, then every character in the transcripts (sorted).
  static SubwordInventory graphemes(const std::vector<std::string> &transcripts);

  TokenizerMode mode() const { return mode_; }
  std::size_t size() const { return units_.size(); }
  const std::string &unit(TokenId id) const { return units_.at(id); }
  const std::vector<std::string> &units() const { return units_; }
  std::optional<TokenId> find(std::string_view unit) const;

  TokenId epsilon() const { return kEpsilon; }
  TokenId sos() const { return kSos; }
  TokenId eos() const { return kEos; }
  TokenId unk() const { return kUnk; }
  // Grapheme separator index; nullopt in wordpiece mode.
  std::optional<TokenId> separator() const;

  // Control tokens: epsilon, sos, eos, unk.
  bool is_control(TokenId id) const { return id >= 0 && id <= kUnk; }
  // Units that are not control tokens or the separator.
  std::size_t num_content_units() const;
  std::size_t max_unit_chars() const { return max_unit_chars_; }

  // Text file: `mode=<grapheme|wordpiece> version=1`, then one unit per line.
  std::string serialize() const;
  static SubwordInventory parse(const std::string &text);
  void save(const std::string &path) const;
  static SubwordInventory load(const std::string &path);
  std::string hash() const;

  bool operator==(const SubwordInventory &o) const {
    return mode_ == o.mode_ && units_ == o.units_;
  }

 private:
  TokenizerMode mode_ = TokenizerMode::kGrapheme;
  std::vector<std::string> units_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_unit_chars_ = 0;
};

// Greedy longest-match segmentation; characters with no unit become <unk>.
std::vector<TokenId> encode(std::string_view text, const SubwordInventory &inv);
// Token lists per word, without separators.
std::vector<std::vector<TokenId>> encode_words(
    const std::vector<std::string> &words, const SubwordInventory &inv);
// Concatenates units, turning word markers / separators into single spaces and
// dropping control tokens.
std::string decode(const std::vector<TokenId> &tokens,
                   const SubwordInventory &inv);

// Unigram log-likelihood sum_u c(u) log(c(u) / N) of a unit count table.
double unigram_log_likelihood(const std::map<std::string, std::size_t> &counts);

struct WordpieceTrainingTrace {
  // Corpus log-likelihood after 0, 1, 2, ... merges.
  std::vector<double> log_likelihood;
  std::vector<std::pair<std::string, std::string>> merges;
};

// Starts from word-initial "_c" and continuation "c" character units and
// repeatedly applies the adjacent-pair merge with the largest unigram
// likelihood gain (ties: lexicographically smallest pair) until
// `target_size` content units exist or no merge increases the likelihood.
// Throws ConfigError if target_size is below the base alphabet size.
SubwordInventory train_wordpieces(const std::vector<std::string> &transcripts,
                                  std::size_t target_size,
                                  WordpieceTrainingTrace *trace = nullptr);

}  // namespace ntkit

#endif  // NTKIT_TOKENIZER_INVENTORY_H_
