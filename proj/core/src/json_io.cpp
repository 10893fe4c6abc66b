// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/json_io.hpp"

#include <fstream>
#include <sstream>

#include "instreplay/error.hpp"

namespace instreplay::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void for_each_jsonl(std::string_view contents, const RecordFn& fn) {
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(number, e.what());
    }
    if (!record.is_object()) throw ParseError(number, "expected a JSON object");
    fn(record, number);
  }
}

void for_each_jsonl_file(const fs::path& path, const RecordFn& fn) {
  for_each_jsonl(read_file(path), fn);
}

Json read_json(const fs::path& path) {
  const std::string body = read_file(path);
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

std::string dump(const Json& value) { return value.dump(2) + "\n"; }

std::string get_string(const Json& record, std::string_view field, std::size_t line) {
  const auto it = record.find(std::string(field));
  if (it == record.end()) throw ParseError(line, "missing field \"" + std::string(field) + "\"");
  if (!it->is_string()) throw ParseError(line, "field \"" + std::string(field) + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace instreplay::io
