// ntkit/include/ntkit/error.h
//
// Copyright 2026 The ntkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef NTKIT_ERROR_H_
#define NTKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace ntkit {

// Base of every error the library throws. The CLI maps the "validation"
// family (bad config, unparsable input, inconsistent data) to exit code 1 and
// everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
  virtual bool is_validation() const { return false; }
};

class ValidationFamily : public Error {
 public:
  using Error::Error;
  bool is_validation() const override { return true; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class EmptyWindowError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class TransferError : public Error {
 public:
  using Error::Error;
};

class EnumerationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public ValidationFamily {
 public:
  using ValidationFamily::ValidationFamily;
};

class ParseError : public ValidationFamily {
 public:
  using ValidationFamily::ValidationFamily;
};

class ValidationError : public ValidationFamily {
 public:
  using ValidationFamily::ValidationFamily;
};

class LexiconError : public ValidationFamily {
 public:
  using ValidationFamily::ValidationFamily;
};

// Raised when a block would need more than M non-epsilon outputs.
class CapExceededError : public ValidationFamily {
 public:
  CapExceededError(const std::string &utterance_id, std::size_t block,
                   std::size_t count, std::size_t cap)
      : ValidationFamily("utterance '" + utterance_id + "' block " +
                         std::to_string(block) + " needs " +
                         std::to_string(count) + " outputs, cap M=" +
                         std::to_string(cap)),
        utterance_id_(utterance_id),
        block_(block),
        count_(count) {}

  const std::string &utterance_id() const { return utterance_id_; }
  std::size_t block() const { return block_; }
  std::size_t count() const { return count_; }

 private:
  std::string utterance_id_;
  std::size_t block_;
  std::size_t count_;
};

}  // namespace ntkit

#endif  // NTKIT_ERROR_H_
