// ntkit/src/harness/config.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/harness/config.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

namespace {

std::size_t to_count(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    n = std::stoull(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError("config key '" + key + "' needs a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(n);
}

double to_real(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError("config key '" + key + "' needs a number, got '" + v + "'");
  }
  return d;
}

std::string real_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(ExperimentConfig &, const std::string &, const std::string &)> set;
  std::function<std::string(const ExperimentConfig &)> get;
};

#define COUNT_FIELD(name)                                                      \
  {                                                                            \
    #name, Field {                                                             \
      [](ExperimentConfig &c, const std::string &k, const std::string &v) {    \
        c.name = to_count(k, v);                                               \
      },                                                                       \
          [](const ExperimentConfig &c) { return std::to_string(c.name); }     \
    }                                                                          \
  }
#define REAL_FIELD(name)                                                       \
  {                                                                            \
    #name, Field {                                                             \
      [](ExperimentConfig &c, const std::string &k, const std::string &v) {    \
        c.name = to_real(k, v);                                                \
      },                                                                       \
          [](const ExperimentConfig &c) { return real_str(c.name); }           \
    }                                                                          \
  }
#define TEXT_FIELD(name)                                                       \
  {                                                                            \
    #name, Field {                                                             \
      [](ExperimentConfig &c, const std::string &, const std::string &v) {     \
        c.name = v;                                                            \
      },                                                                       \
          [](const ExperimentConfig &c) { return c.name; }                     \
    }                                                                          \
  }

// Serialization order is this table's order.
const std::vector<std::pair<std::string, Field>> &fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"mode",
       Field{[](ExperimentConfig &c, const std::string &, const std::string &v) {
               c.mode = parse_model_mode(v);
             },
             [](const ExperimentConfig &c) {
               return std::string(model_mode_name(c.mode));
             }}},
      COUNT_FIELD(W),
      COUNT_FIELD(k),
      COUNT_FIELD(lookahead),
      COUNT_FIELD(heads),
      COUNT_FIELD(encoder_layers),
      COUNT_FIELD(encoder_width),
      COUNT_FIELD(decoder_layers),
      COUNT_FIELD(decoder_width),
      COUNT_FIELD(embed_dim),
      COUNT_FIELD(attention_dim),
      {"tokenizer",
       Field{[](ExperimentConfig &c, const std::string &, const std::string &v) {
               c.tokenizer = parse_mode(v);
             },
             [](const ExperimentConfig &c) {
               return std::string(mode_name(c.tokenizer));
             }}},
      COUNT_FIELD(wpm_size),
      TEXT_FIELD(inventory),
      COUNT_FIELD(M),
      COUNT_FIELD(beam),
      COUNT_FIELD(max_len),
      COUNT_FIELD(lm_order),
      TEXT_FIELD(lm),
      REAL_FIELD(lambda),
      REAL_FIELD(eta),
      REAL_FIELD(beta),
      COUNT_FIELD(steps),
      COUNT_FIELD(batch_size),
      REAL_FIELD(lr),
      REAL_FIELD(lr_floor),
      REAL_FIELD(clip),
      COUNT_FIELD(eval_every),
      COUNT_FIELD(eval_wer_utterances),
      COUNT_FIELD(seed),
      TEXT_FIELD(train_corpus),
      TEXT_FIELD(eval_corpus),
      TEXT_FIELD(init_checkpoint),
      TEXT_FIELD(output_dir),
  };
  return table;
}

#undef COUNT_FIELD
#undef REAL_FIELD
#undef TEXT_FIELD

}  // namespace

void ExperimentConfig::set(const std::string &key, const std::string &value) {
  for (const auto &[name, f] : fields()) {
    if (name == key) {
      f.set(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (W == 0) throw ConfigError("W must be >= 1");
  if (beam == 0) throw ConfigError("beam must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (lm_order == 0) throw ConfigError("lm_order must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (!(lr_floor > 0.0 && lr_floor <= 1.0)) {
    throw ConfigError("lr_floor must be in (0, 1]");
  }
  if (!(clip > 0.0)) throw ConfigError("clip must be > 0");
  FusionWeights{lambda, eta, beta}.validate();
  model_config(1, SubwordInventory::kUnk + 2).validate();
  if (!init_checkpoint.empty() && mode != ModelMode::kNt) {
    throw ConfigError("init_checkpoint only applies to mode=nt");
  }
}

void ExperimentConfig::check_files() const {
  for (const auto &[key, path] : {std::pair<std::string, std::string>{"train_corpus", train_corpus},
                                  {"eval_corpus", eval_corpus},
                                  {"inventory", inventory},
                                  {"lm", lm},
                                  {"init_checkpoint", init_checkpoint}}) {
    if (!path.empty() && !std::filesystem::exists(path)) {
      throw ValidationError(key + " file '" + path + "' does not exist");
    }
  }
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto &[name, f] : fields()) out += name + "=" + f.get(*this) + "\n";
  return out;
}

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const auto &f : fields()) out.push_back(f.first);
  return out;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(serialize())); }

ModelConfig ExperimentConfig::model_config(std::size_t input_dim,
                                           std::size_t vocab_size) const {
  ModelConfig c;
  c.input_dim = input_dim;
  c.encoder_layers = encoder_layers;
  c.encoder_width = encoder_width;
  c.decoder_layers = decoder_layers;
  c.decoder_width = decoder_width;
  c.embed_dim = embed_dim;
  c.attention_dim = attention_dim;
  c.heads = heads;
  c.vocab_size = vocab_size;
  return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string &text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    const auto words = split_words(line);
    if (words.empty()) continue;
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace ntkit
