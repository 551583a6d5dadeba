// ntkit/src/models/checkpoint.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/models/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

namespace {

constexpr const char *kMagic = "ntkit-ckpt v1";

void put_le(std::string &out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_le(const char *p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::size_t field(const std::string &kv, const std::string &key) {
  if (kv.rfind(key + "=", 0) != 0) throw ParseError("expected " + key + "=, got '" + kv + "'");
  try {
    return std::stoul(kv.substr(key.size() + 1));
  } catch (const std::exception &) {
    throw ParseError("bad value in '" + kv + "'");
  }
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint &ckpt) {
  std::ostringstream head;
  head << kMagic << "\n"
       << "mode " << model_mode_name(ckpt.mode) << "\n"
       << "window W=" << ckpt.window.W << " k=" << ckpt.window.k
       << " lookahead=" << ckpt.window.lookahead << "\n"
       << "shapes " << ckpt.params.config.to_string() << "\n"
       << "inventory " << ckpt.inventory_hash << "\n"
       << "limits M=" << ckpt.max_per_block << " max_len=" << ckpt.max_len << "\n";
  ckpt.params.for_each_tensor([&](const std::string &name, const Tensor2 &t) {
    head << "tensor " << name << " " << t.rows << " " << t.cols << "\n";
  });
  head << "data " << ckpt.params.num_params() << "\n";
  std::string out = head.str();
  ckpt.params.for_each_tensor([&](const std::string &, const Tensor2 &t) {
    for (double v : t.data) put_le(out, v);
  });
  return out;
}

Checkpoint parse_checkpoint(const std::string &bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw ParseError("truncated checkpoint header");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  if (next_line() != kMagic) throw ParseError("not an ntkit-ckpt v1 file");

  Checkpoint ckpt;
  auto words = split_words(next_line());
  if (words.size() != 2 || words[0] != "mode") throw ParseError("bad checkpoint mode line");
  ckpt.mode = parse_model_mode(words[1]);

  words = split_words(next_line());
  if (words.size() != 4 || words[0] != "window") throw ParseError("bad checkpoint window line");
  ckpt.window.W = field(words[1], "W");
  ckpt.window.k = field(words[2], "k");
  ckpt.window.lookahead = field(words[3], "lookahead");

  std::string line = next_line();
  if (line.rfind("shapes ", 0) != 0) throw ParseError("bad checkpoint shapes line");
  ckpt.params = ModelParams(ModelConfig::from_string(line.substr(7)));

  words = split_words(next_line());
  if (words.size() != 2 || words[0] != "inventory") {
    throw ParseError("bad checkpoint inventory line");
  }
  ckpt.inventory_hash = words[1];

  words = split_words(next_line());
  if (words.size() != 3 || words[0] != "limits") throw ParseError("bad checkpoint limits line");
  ckpt.max_per_block = field(words[1], "M");
  ckpt.max_len = field(words[2], "max_len");

  std::vector<std::string> tensor_lines;
  for (line = next_line(); line.rfind("tensor ", 0) == 0; line = next_line()) {
    tensor_lines.push_back(line);
  }
  std::size_t i = 0;
  ckpt.params.for_each_tensor([&](const std::string &name, const Tensor2 &t) {
    const std::string want = "tensor " + name + " " + std::to_string(t.rows) +
                             " " + std::to_string(t.cols);
    if (i >= tensor_lines.size() || tensor_lines[i] != want) {
      throw ShapeError("checkpoint tensor " + std::to_string(i) + " is '" +
                       (i < tensor_lines.size() ? tensor_lines[i] : "<missing>") +
                       "', shapes imply '" + want + "'");
    }
    ++i;
  });
  if (i != tensor_lines.size()) throw ShapeError("checkpoint has extra tensors");

  words = split_words(line);
  const std::size_t n = ckpt.params.num_params();
  if (words.size() != 2 || words[0] != "data" || words[1] != std::to_string(n)) {
    throw ShapeError("checkpoint data line '" + line + "' does not match " +
                     std::to_string(n) + " parameters");
  }
  if (bytes.size() - pos != 8 * n) {
    throw ParseError("checkpoint payload is " + std::to_string(bytes.size() - pos) +
                     " bytes, expected " + std::to_string(8 * n));
  }
  Vec flat(n);
  for (std::size_t k = 0; k < n; ++k) flat[k] = get_le(bytes.data() + pos + 8 * k);
  ckpt.params.unflatten(flat);
  return ckpt;
}

void save_checkpoint(const Checkpoint &ckpt, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << serialize_checkpoint(ckpt);
  if (!out) throw Error("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

void check_inventory(const Checkpoint &ckpt, const SubwordInventory &inventory) {
  if (ckpt.inventory_hash != inventory.hash()) {
    throw ValidationError("checkpoint inventory hash " + ckpt.inventory_hash +
                          " does not match inventory " + inventory.hash());
  }
  if (ckpt.params.config.vocab_size != inventory.size()) {
    throw ValidationError("checkpoint vocabulary " +
                          std::to_string(ckpt.params.config.vocab_size) +
                          " differs from inventory size " +
                          std::to_string(inventory.size()));
  }
}

}  // namespace ntkit
