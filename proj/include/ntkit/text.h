// ntkit/include/ntkit/text.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_TEXT_H_
#define NTKIT_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ntkit {

// Splits UTF-8 text into code points, each returned as its byte string.
// Invalid lead bytes are returned as single-byte units.
std::vector<std::string> split_utf8(std::string_view text);

// Splits on ASCII whitespace, dropping empty fields.
std::vector<std::string> split_words(std::string_view text);

std::string join(const std::vector<std::string> &parts, std::string_view sep);

// FNV-1a, used for provenance hashes (configs, corpora, inventories).
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace ntkit

#endif  // NTKIT_TEXT_H_
