// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "instreplay/corpus.hpp"
#include "instreplay/taginfo.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::replay {

enum class Strategy {
  kInsCL,             // distance-proportional budgets + InsInfo-guided sampling
  kRandom,
  kProtoData,
  kProtoInstruction,
  kDiverse,
  kDynamicRandom,     // ablation: distance budgets, uniform sampling
  kInsInfoOnly,       // ablation: equal budgets, InsInfo sampling
};

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy strategy) noexcept;
// Strategies whose per-task budgets follow the Wasserstein distances.
bool uses_dynamic_budgets(Strategy strategy) noexcept;

struct TaskBudget {
  std::string task_id;
  std::int64_t budget = 0;

  friend bool operator==(const TaskBudget&, const TaskBudget&) = default;
};

struct Allocation {
  std::vector<TaskBudget> budgets;  // input order
  bool equal_split = false;         // every distance was zero
};

// Largest-remainder split of `total_budget` proportional to distance, ties to
// the smaller task id. All-zero distances split equally.
Allocation allocate_budgets(std::span<const std::pair<std::string, double>> distances,
                            std::int64_t total_budget);

struct InstructionQuota {
  std::string instruction;
  double score = 0.0;  // InsInfo
  std::int64_t quota = 0;
};

struct SampleResult {
  std::vector<std::string> ids;
  std::vector<InstructionQuota> quotas;  // histogram order
  bool clamped = false;                  // budget exceeded the task size
};

// InsInfo-guided sampling: quotas proportional to InsInfo share, capped by
// bucket size with surplus redistributed, each bucket sampled uniformly
// without replacement. All-zero scores give uniform shares.
SampleResult insinfo_sample(const corpus::TaskDataset& task, std::int64_t budget,
                            const taginfo::InstructionPool& pool, std::uint64_t seed);

struct TaskDistance {
  std::string task_id;
  double value = 0.0;
  bool converged = true;
};

struct TaskQuotas {
  std::string task_id;
  std::vector<std::pair<std::string, std::int64_t>> quotas;  // histogram order
};

struct ReplayPlan {
  std::size_t stage = 1;
  Strategy strategy = Strategy::kInsCL;
  transport::Mode mode = transport::Mode::kReal;
  transport::Method method = transport::Method::kExact;
  std::int64_t alpha_per_task = 0;
  std::uint64_t seed = 0;
  std::int64_t total_budget = 0;  // (stage - 1) * alpha_per_task
  std::size_t pool_total = 0;
  std::vector<TaskDistance> distances;
  std::vector<TaskBudget> task_budgets;       // sums to total_budget
  std::vector<TaskBudget> effective_budgets;  // after capping at task sizes
  std::vector<TaskQuotas> instruction_quotas;
  std::vector<std::string> sampled_ids;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

struct AugmentedRow {
  corpus::Instance instance;
  std::optional<std::string> replay_of;  // source task of a replayed row
};

struct StageOptions {
  Strategy strategy = Strategy::kInsCL;
  std::int64_t alpha_per_task = 200;
  transport::DistanceOptions distance;
  std::uint64_t seed = 0;
};

struct StageInputs {
  const corpus::TaskDataset& current;
  std::span<const corpus::TaskDataset> previous;  // task order
  const corpus::EmbeddingTable& embeddings;       // instruction embeddings
  const taginfo::InstructionPool& pool;           // covers `previous`
  // Keyed by instance id; only the proto-data strategy needs it.
  const corpus::EmbeddingTable* instance_embeddings = nullptr;
};

struct StageDataset {
  std::vector<AugmentedRow> rows;  // current instances, then replay by task order
  ReplayPlan plan;
};

// Stage number is previous.size() + 1.
StageDataset build_stage_dataset(const StageInputs& inputs, const StageOptions& options);

// Corpus JSONL plus "replay_of" on replayed rows.
std::string serialize_augmented(std::span<const AugmentedRow> rows);

}  // namespace instreplay::replay
