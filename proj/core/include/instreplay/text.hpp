// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace instreplay::text {

// Unicode NFC normalization of UTF-8 text. Invalid UTF-8 is rejected with a
// validation error.
std::string nfc(std::string_view utf8);

// Per-codepoint classification used by the tag normalizer and the Rouge-L
// tokenizer. Both operate on simple (1:1) lowercase mapping.
enum class CharClass { kSpace, kAlnum, kPunct, kOther };

struct CodePoint {
  char32_t value;
  CharClass cls;
};

std::vector<CodePoint> decode(std::string_view utf8);
void append_utf8(std::string& out, char32_t cp);
char32_t to_lower(char32_t cp);

}  // namespace instreplay::text
