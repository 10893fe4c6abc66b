// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace instreplay::corpus {

// One training example: {instruction, input, output} plus its task.
struct Instance {
  std::string id;
  std::string task_id;
  std::string instruction;
  std::string input;
  std::string output;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct HistogramEntry {
  std::string instruction;
  std::size_t count = 0;
  double probability = 0.0;  // count / task size
};

// Instances of one task and the empirical distribution over its distinct
// instructions. Immutable after construction.
class TaskDataset {
 public:
  TaskDataset() = default;
  // All instances must carry `task_id`. Histogram keys follow first
  // appearance.
  TaskDataset(std::string task_id, std::vector<Instance> instances);

  const std::string& task_id() const noexcept { return task_id_; }
  std::span<const Instance> instances() const noexcept { return instances_; }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }

  const std::vector<HistogramEntry>& histogram() const noexcept { return histogram_; }
  std::vector<std::string> instructions() const;

  // Positions (into instances()) of the instances bearing `instruction`, in
  // corpus order. Lookup error if the instruction is not in this task.
  const std::vector<std::size_t>& bucket(std::string_view instruction) const;

 private:
  std::string task_id_;
  std::vector<Instance> instances_;
  std::vector<HistogramEntry> histogram_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> buckets_;
};

enum class Format { kJsonl };

// Groups records by task_id in first-appearance order. Instruction text is
// NFC-normalized; missing ids become "<task_id>#<line>".
std::vector<TaskDataset> load_corpus(const std::filesystem::path& path,
                                     Format format = Format::kJsonl);
std::vector<TaskDataset> parse_corpus(std::string_view jsonl);

// One JSON object per line, fields in the order id, task_id, instruction,
// input, output.
std::string serialize_corpus(std::span<const TaskDataset> tasks);
std::string serialize_instance(const Instance& instance);

const TaskDataset& find_task(std::span<const TaskDataset> tasks, std::string_view task_id);

struct HoldoutSplit {
  TaskDataset train;
  TaskDataset holdout;
};

// Uniform random split of one task. |holdout| = round(fraction * n) with
// half-away-from-zero rounding, clamped to [1, n-1]. Both halves keep corpus
// order.
HoldoutSplit split_holdout(const TaskDataset& task, double fraction, std::uint64_t seed);

// Fixed-dimension vectors keyed by text. Zero vectors are rejected.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  void insert(std::string key, std::vector<double> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool contains(std::string_view key) const;

  // MissingEmbeddingError naming the key when absent.
  std::span<const double> at(std::string_view key) const;
  void require(std::span<const std::string> keys) const;

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>, std::less<>> rows_;
};

// JSON Lines: {"key": str, "vector": [num, ...]}.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable parse_embeddings(std::string_view jsonl);

// instruction -> raw tags, as emitted by an upstream tagger.
using TagTable = std::map<std::string, std::vector<std::string>, std::less<>>;

// JSON Lines: {"key": instruction, "tags": [str, ...]}.
TagTable load_tags(const std::filesystem::path& path);
TagTable parse_tags(std::string_view jsonl);
std::string serialize_tags(const TagTable& tags);

// category name -> task ids.
using CategoryMap = std::map<std::string, std::vector<std::string>>;
CategoryMap load_categories(const std::filesystem::path& path);

}  // namespace instreplay::corpus
