// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "instreplay/corpus.hpp"
#include "instreplay/replay.hpp"
#include "instreplay/taginfo.hpp"

namespace instreplay::pipeline {

std::string sha256_hex(std::string_view bytes);

// Relative paths in the config file are resolved against its directory.
struct RunConfig {
  std::vector<std::string> task_order;
  std::int64_t alpha_per_task = 200;
  replay::Strategy strategy = replay::Strategy::kInsCL;
  transport::DistanceOptions distance;
  std::uint64_t seed = 0;
  double cluster_threshold = taginfo::kDefaultClusterThreshold;

  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path tags;
  std::optional<std::filesystem::path> tag_embeddings;
  std::optional<std::filesystem::path> instance_embeddings;
  std::optional<std::filesystem::path> bounds;
  std::filesystem::path work_dir;

  static RunConfig from_json(const nlohmann::ordered_json& doc,
                             const std::filesystem::path& base_dir);
  // Settings only; paths are covered by the input hashes.
  nlohmann::ordered_json settings_json() const;
};

RunConfig load_config(const std::filesystem::path& path);

struct StageReport {
  std::size_t stage = 0;
  std::string task_id;
  std::size_t current_rows = 0;
  std::size_t replay_rows = 0;
  bool skipped = false;  // already completed, resumed past
};

struct RunSummary {
  std::vector<StageReport> stages;
  std::filesystem::path manifest;
};

// Loads and validates every input named by the config once; stages are then
// planned from memory. Stage numbers are 1-based positions in task_order.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  const RunConfig& config() const noexcept { return config_; }
  std::size_t stage_count() const noexcept { return order_.size(); }
  const corpus::TaskDataset& task(std::size_t stage) const;
  const taginfo::TagCanonicalizer& canonicalizer() const noexcept { return canonicalizer_; }

  // Pool holding tasks 1..stage-1, rebuilt from the inputs.
  taginfo::InstructionPool pool_before(std::size_t stage) const;
  replay::StageDataset build(std::size_t stage, const taginfo::InstructionPool& pool) const;

  // Hash of the settings plus the content of every input file.
  const std::string& config_hash() const noexcept { return config_hash_; }

  // Stateful stage protocol under work_dir. Stage i > 1 needs stage i-1 in
  // the state; a state written under a different config hash is a
  // validation error unless `force`, which discards it.
  StageReport run_stage(std::size_t stage, bool force = false);
  // Runs every stage in order, skipping completed ones unless `force`.
  RunSummary run_all(bool force = false);

 private:
  void check_stage(std::size_t stage) const;
  std::filesystem::path state_dir() const;
  void write_manifest() const;

  RunConfig config_;
  std::vector<corpus::TaskDataset> corpus_;
  std::vector<const corpus::TaskDataset*> order_;
  corpus::EmbeddingTable embeddings_;
  std::optional<corpus::EmbeddingTable> instance_embeddings_;
  corpus::TagTable tags_;
  taginfo::TagCanonicalizer canonicalizer_;
  std::string config_hash_;
};

nlohmann::ordered_json distances_json(const replay::ReplayPlan& plan);

}  // namespace instreplay::pipeline
