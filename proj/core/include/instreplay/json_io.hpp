// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace instreplay::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);

// Writes via a temporary sibling and rename so readers never observe a
// partial file. Parent directories are created.
void write_file(const std::filesystem::path& path, std::string_view contents);

using RecordFn = std::function<void(const Json&, std::size_t)>;

// Calls `fn(record, line_number)` for every non-blank line; line numbers are
// 1-based. A line that is not a JSON object raises ParseError.
void for_each_jsonl(std::string_view contents, const RecordFn& fn);
void for_each_jsonl_file(const std::filesystem::path& path, const RecordFn& fn);

Json read_json(const std::filesystem::path& path);

// Pretty-printed with a trailing newline; stable for identical inputs.
std::string dump(const Json& value);

// Required string field; ParseError naming the field otherwise.
std::string get_string(const Json& record, std::string_view field, std::size_t line);

}  // namespace instreplay::io
