// ntkit/src/frontend/corpus.cc
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntkit/frontend/corpus.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ntkit/error.h"
#include "ntkit/text.h"

namespace ntkit {

using nlohmann::json;

namespace {

Utterance parse_record(const json &j) {
  Utterance utt;
  utt.features.utterance_id = j.at("id").get<std::string>();
  utt.transcript = j.at("transcript").get<std::string>();
  const json &frames = j.at("frames");
  if (!frames.is_array() || frames.empty()) {
    throw ParseError("`frames` must be a nonempty array");
  }
  const std::size_t dim = frames.at(0).size();
  utt.features.frames = Tensor2(frames.size(), dim);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const json &row = frames[t];
    if (!row.is_array() || row.size() != dim) {
      throw ParseError("frame " + std::to_string(t) + " has width " +
                       std::to_string(row.size()) + ", expected " +
                       std::to_string(dim));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      utt.features.frames(t, d) = row[d].get<double>();
    }
  }
  for (const json &e : j.at("alignment")) {
    if (!e.is_array() || e.size() != 3) {
      throw ParseError("alignment entries must be [word, start, end]");
    }
    AlignedWord w;
    w.word = e[0].get<std::string>();
    w.start_frame = e[1].get<std::size_t>();
    w.end_frame = e[2].get<std::size_t>();
    utt.alignment.entries.push_back(std::move(w));
  }
  return utt;
}

}  // namespace

Corpus parse_corpus(const std::string &text) {
  Corpus corpus;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Utterance utt;
    try {
      utt = parse_record(json::parse(line));
    } catch (const json::exception &e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " +
                       e.what());
    } catch (const ParseError &e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    validate_alignment(utt.alignment, utt.features.num_frames(), utt.id());
    if (utt.alignment.words() != split_words(utt.transcript)) {
      throw ValidationError("utterance '" + utt.id() +
                            "': alignment words differ from transcript");
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

Corpus load_corpus(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::string serialize_utterance(const Utterance &utt) {
  json j;
  j["id"] = utt.id();
  j["transcript"] = utt.transcript;
  json frames = json::array();
  for (std::size_t t = 0; t < utt.features.num_frames(); ++t) {
    const auto row = utt.features.frames.row(t);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["frames"] = std::move(frames);
  json alignment = json::array();
  for (const auto &e : utt.alignment.entries) {
    alignment.push_back(json::array({e.word, e.start_frame, e.end_frame}));
  }
  j["alignment"] = std::move(alignment);
  return j.dump();
}

void save_corpus(const Corpus &corpus, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file '" + path + "'");
  for (const auto &utt : corpus) out << serialize_utterance(utt) << '\n';
}

std::string corpus_hash(const Corpus &corpus) {
  std::uint64_t h = fnv1a64("");
  for (const auto &utt : corpus) h = fnv1a64(serialize_utterance(utt), h);
  return hex64(h);
}

}  // namespace ntkit
