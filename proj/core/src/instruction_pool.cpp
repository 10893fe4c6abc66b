// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "instreplay/error.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/taginfo.hpp"

namespace instreplay::taginfo {

using io::Json;

std::size_t InstructionPool::frequency(std::string_view tag) const {
  const auto it = freq_.find(tag);
  return it == freq_.end() ? 0 : it->second;
}

bool InstructionPool::contains(std::string_view instruction) const {
  return entries_.find(instruction) != entries_.end();
}

bool InstructionPool::has_task(std::string_view task_id) const {
  return tasks_.find(task_id) != tasks_.end();
}

const InstructionPool::Entry& InstructionPool::at(std::string_view instruction) const {
  const auto it = entries_.find(instruction);
  if (it == entries_.end()) {
    fail(ErrorKind::kLookup, "instruction not in pool: \"" + std::string(instruction) + "\"");
  }
  return it->second;
}

std::vector<std::string> InstructionPool::task_instructions(std::string_view task_id) const {
  std::vector<std::string> out;
  for (const auto& [instruction, entry] : entries_) {
    if (std::find(entry.tasks.begin(), entry.tasks.end(), task_id) != entry.tasks.end()) {
      out.push_back(instruction);
    }
  }
  return out;
}

void InstructionPool::add_task(const corpus::TaskDataset& task, const corpus::TagTable& tags,
                               const TagCanonicalizer& canonicalizer) {
  if (has_task(task.task_id())) {
    fail(ErrorKind::kState, "task " + task.task_id() + " is already in the instruction pool");
  }
  tasks_.insert(task.task_id());
  for (const corpus::HistogramEntry& h : task.histogram()) {
    auto [it, fresh] = entries_.try_emplace(h.instruction);
    Entry& entry = it->second;
    entry.tasks.push_back(task.task_id());
    if (!fresh) continue;
    // Untagged instructions score zero rather than failing.
    if (const auto t = tags.find(h.instruction); t != tags.end()) {
      entry.tags = canonicalizer.canonicalize(t->second);
    }
    for (const std::string& tag : entry.tags) ++freq_[tag];
  }
}

void InstructionPool::check_consistency() const {
  Frequencies recount;
  std::set<std::string, std::less<>> tasks;
  for (const auto& [instruction, entry] : entries_) {
    std::set<std::string, std::less<>> unique(entry.tags.begin(), entry.tags.end());
    if (unique.size() != entry.tags.size()) {
      fail(ErrorKind::kState, "duplicate tags on pooled instruction \"" + instruction + "\"");
    }
    if (entry.tasks.empty()) fail(ErrorKind::kState, "pooled instruction without a task");
    for (const std::string& tag : entry.tags) ++recount[tag];
    tasks.insert(entry.tasks.begin(), entry.tasks.end());
  }
  if (recount != freq_) fail(ErrorKind::kState, "pool tag frequencies do not match a recount");
  if (tasks != tasks_) fail(ErrorKind::kState, "pool task index does not match its entries");
}

Json InstructionPool::to_json() const {
  Json doc;
  Json entries = Json::object();
  for (const auto& [instruction, entry] : entries_) {
    Json e;
    e["tags"] = entry.tags;
    e["tasks"] = entry.tasks;
    entries[instruction] = std::move(e);
  }
  doc["entries"] = std::move(entries);
  doc["total"] = total();
  Json freq = Json::object();
  for (const auto& [tag, count] : freq_) freq[tag] = count;
  doc["freq"] = std::move(freq);
  return doc;
}

InstructionPool InstructionPool::from_json(const Json& doc) {
  InstructionPool pool;
  try {
    for (const auto& [instruction, e] : doc.at("entries").items()) {
      Entry entry;
      entry.tags = e.at("tags").get<std::vector<std::string>>();
      entry.tasks = e.at("tasks").get<std::vector<std::string>>();
      pool.tasks_.insert(entry.tasks.begin(), entry.tasks.end());
      pool.entries_.emplace(instruction, std::move(entry));
    }
    for (const auto& [tag, count] : doc.at("freq").items()) {
      pool.freq_.emplace(tag, count.get<std::size_t>());
    }
    if (doc.at("total").get<std::size_t>() != pool.total()) {
      fail(ErrorKind::kState, "pool total does not match its entry count");
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed pool file: ") + e.what());
  }
  pool.check_consistency();
  return pool;
}

InstructionPool update_pool(InstructionPool pool, const corpus::TaskDataset& task,
                            const corpus::TagTable& tags, const TagCanonicalizer& canonicalizer) {
  pool.add_task(task, tags, canonicalizer);
  return pool;
}

double insinfo(std::string_view instruction, const InstructionPool& pool) {
  const InstructionPool::Entry& entry = pool.at(instruction);
  const auto n = static_cast<double>(pool.total());
  double score = 0.0;
  for (const std::string& tag : entry.tags) {
    score += std::log(n / static_cast<double>(pool.frequency(tag)));
  }
  return score;
}

void save_pool(const InstructionPool& pool, const std::filesystem::path& path) {
  io::write_file(path, io::dump(pool.to_json()));
}

InstructionPool load_pool(const std::filesystem::path& path) {
  return InstructionPool::from_json(io::read_json(path));
}

}  // namespace instreplay::taginfo
