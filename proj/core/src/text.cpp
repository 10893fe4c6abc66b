// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cctype>

#include "instreplay/error.hpp"

namespace instreplay::text {

namespace {

bool is_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

}  // namespace

std::string nfc(std::string_view utf8) {
  // ASCII is already in NFC.
  if (is_ascii(utf8)) return std::string(utf8);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) fail(ErrorKind::kState, "ICU NFC normalizer unavailable");

  // decode() validates; ICU would silently substitute U+FFFD.
  (void)decode(utf8);
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status)) fail(ErrorKind::kValidation, "NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<CodePoint> decode(std::string_view utf8) {
  std::vector<CodePoint> out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c < 0) fail(ErrorKind::kValidation, "invalid UTF-8 sequence");
    CharClass cls = CharClass::kOther;
    if (u_isUWhiteSpace(c)) {
      cls = CharClass::kSpace;
    } else if (u_isalnum(c)) {
      cls = CharClass::kAlnum;
    } else if (u_ispunct(c) || (c < 0x80 && std::ispunct(static_cast<int>(c)))) {
      cls = CharClass::kPunct;
    }
    out.push_back({static_cast<char32_t>(c), cls});
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) fail(ErrorKind::kValidation, "cannot encode code point");
  out.append(buf, static_cast<std::size_t>(n));
}

char32_t to_lower(char32_t cp) {
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}

}  // namespace instreplay::text
