// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/error.hpp"

namespace instreplay {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kMissingEmbedding: return "missing-embedding";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kState: return "state";
    case ErrorKind::kSequencing: return "sequencing";
    case ErrorKind::kSplit: return "split";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace instreplay
