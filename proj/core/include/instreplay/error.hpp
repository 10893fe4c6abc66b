// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace instreplay {

enum class ErrorKind {
  kParse,            // malformed input record
  kValidation,       // record or argument violates a contract
  kFormat,           // file structure is wrong (e.g. vector length)
  kMissingEmbedding, // lookup of a key with no embedding row
  kDomain,           // numeric argument outside the function domain
  kNumeric,          // overflow / NaN during computation
  kLookup,           // key absent from an in-memory index
  kState,            // object used in an invalid state
  kSequencing,       // pipeline stage run out of order
  kSplit,            // holdout split impossible
  kIo,               // filesystem failure
};

std::string_view to_string(ErrorKind kind) noexcept;

// All library errors derive from this. kind() drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MissingEmbeddingError : public Error {
 public:
  explicit MissingEmbeddingError(const std::string& key)
      : Error(ErrorKind::kMissingEmbedding, "missing embedding for \"" + key + "\""),
        key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace instreplay
