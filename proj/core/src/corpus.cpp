// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "instreplay/error.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/rng.hpp"
#include "instreplay/text.hpp"

namespace instreplay::corpus {

using io::Json;

TaskDataset::TaskDataset(std::string task_id, std::vector<Instance> instances)
    : task_id_(std::move(task_id)), instances_(std::move(instances)) {
  if (task_id_.empty()) fail(ErrorKind::kValidation, "task_id must be non-empty");
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    const Instance& inst = instances_[i];
    if (inst.task_id != task_id_) {
      fail(ErrorKind::kValidation, "instance " + inst.id + " belongs to task " + inst.task_id +
                                       ", not " + task_id_);
    }
    auto [it, fresh] = buckets_.try_emplace(inst.instruction);
    if (fresh) histogram_.push_back({inst.instruction, 0, 0.0});
    it->second.push_back(i);
  }
  const auto n = static_cast<double>(instances_.size());
  for (HistogramEntry& entry : histogram_) {
    entry.count = buckets_.find(entry.instruction)->second.size();
    entry.probability = static_cast<double>(entry.count) / n;
  }
}

std::vector<std::string> TaskDataset::instructions() const {
  std::vector<std::string> out;
  out.reserve(histogram_.size());
  for (const HistogramEntry& entry : histogram_) out.push_back(entry.instruction);
  return out;
}

const std::vector<std::size_t>& TaskDataset::bucket(std::string_view instruction) const {
  const auto it = buckets_.find(instruction);
  if (it == buckets_.end()) {
    fail(ErrorKind::kLookup, "task " + task_id_ + " has no instruction \"" +
                                 std::string(instruction) + "\"");
  }
  return it->second;
}

std::vector<TaskDataset> parse_corpus(std::string_view jsonl) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Instance>> grouped;
  std::set<std::string, std::less<>> seen_ids;

  io::for_each_jsonl(jsonl, [&](const Json& record, std::size_t line) {
    Instance inst;
    inst.task_id = io::get_string(record, "task_id", line);
    inst.instruction = text::nfc(io::get_string(record, "instruction", line));
    inst.input = io::get_string(record, "input", line);
    inst.output = io::get_string(record, "output", line);
    if (inst.task_id.empty()) {
      fail(ErrorKind::kValidation, "line " + std::to_string(line) + ": empty task_id");
    }
    if (inst.instruction.empty()) {
      fail(ErrorKind::kValidation, "line " + std::to_string(line) + ": empty instruction");
    }
    if (record.contains("id")) {
      inst.id = io::get_string(record, "id", line);
    } else {
      inst.id = inst.task_id + "#" + std::to_string(line);
    }
    if (!seen_ids.insert(inst.id).second) {
      fail(ErrorKind::kValidation,
           "line " + std::to_string(line) + ": duplicate instance id \"" + inst.id + "\"");
    }
    auto [it, fresh] = grouped.try_emplace(inst.task_id);
    if (fresh) order.push_back(inst.task_id);
    it->second.push_back(std::move(inst));
  });

  std::vector<TaskDataset> tasks;
  tasks.reserve(order.size());
  for (const std::string& task_id : order) {
    tasks.emplace_back(task_id, std::move(grouped[task_id]));
  }
  return tasks;
}

std::vector<TaskDataset> load_corpus(const std::filesystem::path& path, Format format) {
  switch (format) {
    case Format::kJsonl:
      return parse_corpus(io::read_file(path));
  }
  fail(ErrorKind::kValidation, "unsupported corpus format");
}

std::string serialize_instance(const Instance& instance) {
  Json record;
  record["id"] = instance.id;
  record["task_id"] = instance.task_id;
  record["instruction"] = instance.instruction;
  record["input"] = instance.input;
  record["output"] = instance.output;
  return record.dump();
}

std::string serialize_corpus(std::span<const TaskDataset> tasks) {
  std::string out;
  for (const TaskDataset& task : tasks) {
    for (const Instance& inst : task.instances()) {
      out += serialize_instance(inst);
      out += '\n';
    }
  }
  return out;
}

const TaskDataset& find_task(std::span<const TaskDataset> tasks, std::string_view task_id) {
  for (const TaskDataset& task : tasks) {
    if (task.task_id() == task_id) return task;
  }
  fail(ErrorKind::kValidation, "unknown task \"" + std::string(task_id) + "\"");
}

HoldoutSplit split_holdout(const TaskDataset& task, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    fail(ErrorKind::kValidation, "holdout fraction must lie in (0, 1)");
  }
  const std::size_t n = task.size();
  if (n < 2) {
    fail(ErrorKind::kSplit, "task " + task.task_id() + " needs at least 2 instances to split");
  }
  // std::round rounds half away from zero.
  auto holdout_size = static_cast<std::size_t>(std::round(fraction * static_cast<double>(n)));
  holdout_size = std::clamp<std::size_t>(holdout_size, 1, n - 1);

  Rng rng(derive_seed(seed, "holdout", task.task_id()));
  std::vector<bool> held(n, false);
  for (std::size_t idx : rng.sample_indices(n, holdout_size)) held[idx] = true;

  std::vector<Instance> train;
  std::vector<Instance> holdout;
  for (std::size_t i = 0; i < n; ++i) {
    (held[i] ? holdout : train).push_back(task.instances()[i]);
  }
  return {TaskDataset(task.task_id(), std::move(train)),
          TaskDataset(task.task_id(), std::move(holdout))};
}

void EmbeddingTable::insert(std::string key, std::vector<double> vector) {
  if (vector.empty()) fail(ErrorKind::kFormat, "empty embedding for \"" + key + "\"");
  if (rows_.empty()) {
    dim_ = vector.size();
  } else if (vector.size() != dim_) {
    fail(ErrorKind::kFormat, "embedding for \"" + key + "\" has length " +
                                 std::to_string(vector.size()) + ", expected " +
                                 std::to_string(dim_));
  }
  bool nonzero = false;
  for (double x : vector) {
    if (!std::isfinite(x)) fail(ErrorKind::kFormat, "non-finite embedding value for \"" + key + "\"");
    nonzero = nonzero || x != 0.0;
  }
  if (!nonzero) fail(ErrorKind::kFormat, "zero embedding vector for \"" + key + "\"");
  key = text::nfc(key);
  if (!rows_.try_emplace(key, std::move(vector)).second) {
    fail(ErrorKind::kFormat, "duplicate embedding key \"" + key + "\"");
  }
}

bool EmbeddingTable::contains(std::string_view key) const { return rows_.find(key) != rows_.end(); }

std::span<const double> EmbeddingTable::at(std::string_view key) const {
  const auto it = rows_.find(key);
  if (it == rows_.end()) throw MissingEmbeddingError(std::string(key));
  return it->second;
}

void EmbeddingTable::require(std::span<const std::string> keys) const {
  for (const std::string& key : keys) (void)at(key);
}

EmbeddingTable parse_embeddings(std::string_view jsonl) {
  EmbeddingTable table;
  io::for_each_jsonl(jsonl, [&](const Json& record, std::size_t line) {
    std::string key = io::get_string(record, "key", line);
    const auto it = record.find("vector");
    if (it == record.end() || !it->is_array()) throw ParseError(line, "missing array field \"vector\"");
    std::vector<double> vec;
    vec.reserve(it->size());
    for (const Json& x : *it) {
      if (!x.is_number()) throw ParseError(line, "vector entries must be numbers");
      vec.push_back(x.get<double>());
    }
    try {
      table.insert(std::move(key), std::move(vec));
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(line) + ": " + e.what());
    }
  });
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(io::read_file(path));
}

TagTable parse_tags(std::string_view jsonl) {
  TagTable table;
  io::for_each_jsonl(jsonl, [&](const Json& record, std::size_t line) {
    std::string key = text::nfc(io::get_string(record, "key", line));
    const auto it = record.find("tags");
    if (it == record.end() || !it->is_array()) throw ParseError(line, "missing array field \"tags\"");
    std::vector<std::string> tags;
    for (const Json& t : *it) {
      if (!t.is_string()) throw ParseError(line, "tags must be strings");
      tags.push_back(t.get<std::string>());
    }
    if (!table.try_emplace(std::move(key), std::move(tags)).second) {
      fail(ErrorKind::kFormat, "line " + std::to_string(line) + ": duplicate tag key");
    }
  });
  return table;
}

TagTable load_tags(const std::filesystem::path& path) { return parse_tags(io::read_file(path)); }

std::string serialize_tags(const TagTable& tags) {
  std::string out;
  for (const auto& [key, list] : tags) {
    Json record;
    record["key"] = key;
    record["tags"] = list;
    out += record.dump();
    out += '\n';
  }
  return out;
}

CategoryMap load_categories(const std::filesystem::path& path) {
  const Json doc = io::read_json(path);
  if (!doc.is_object()) fail(ErrorKind::kFormat, "category map must be a JSON object");
  CategoryMap out;
  for (const auto& [name, ids] : doc.items()) {
    if (!ids.is_array()) fail(ErrorKind::kFormat, "category \"" + name + "\" must map to an array");
    auto& list = out[name];
    for (const Json& id : ids) {
      if (id.is_string()) {
        list.push_back(id.get<std::string>());
      } else if (id.is_number_integer()) {
        list.push_back(std::to_string(id.get<long long>()));
      } else {
        fail(ErrorKind::kFormat, "category \"" + name + "\" has a non-string task id");
      }
    }
  }
  return out;
}

}  // namespace instreplay::corpus
