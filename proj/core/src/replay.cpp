// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/replay.hpp"

#include <algorithm>
#include <map>

#include "instreplay/apportion.hpp"
#include "instreplay/baselines.hpp"
#include "instreplay/error.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/rng.hpp"

namespace instreplay::replay {

using io::Json;

namespace {

constexpr std::pair<Strategy, std::string_view> kStrategyNames[] = {
    {Strategy::kInsCL, "inscl"},
    {Strategy::kRandom, "random"},
    {Strategy::kProtoData, "proto-data"},
    {Strategy::kProtoInstruction, "proto-instruction"},
    {Strategy::kDiverse, "diverse"},
    {Strategy::kDynamicRandom, "dynamic-random"},
    {Strategy::kInsInfoOnly, "insinfo-only"},
};

std::vector<std::string> select(Strategy strategy, const corpus::TaskDataset& task,
                                std::int64_t budget, const StageInputs& in, std::uint64_t seed) {
  switch (strategy) {
    case Strategy::kInsCL:
    case Strategy::kInsInfoOnly:
      return insinfo_sample(task, budget, in.pool, seed).ids;
    case Strategy::kRandom:
    case Strategy::kDynamicRandom:
      return baselines::random_replay(task, budget, seed);
    case Strategy::kProtoData:
      if (in.instance_embeddings == nullptr) {
        fail(ErrorKind::kValidation, "proto-data needs instance embeddings");
      }
      return baselines::prototype_data(task, budget, *in.instance_embeddings, seed);
    case Strategy::kProtoInstruction:
      return baselines::prototype_instruction(task, budget, in.embeddings, seed);
    case Strategy::kDiverse: {
      const std::vector<std::string> current = in.current.instructions();
      return baselines::diverse_instruction(task, budget, current, in.embeddings, seed);
    }
  }
  fail(ErrorKind::kValidation, "unknown strategy");
}

}  // namespace

Strategy parse_strategy(std::string_view name) {
  for (const auto& [strategy, text] : kStrategyNames) {
    if (text == name) return strategy;
  }
  fail(ErrorKind::kValidation, "unknown strategy \"" + std::string(name) + "\"");
}

std::string_view to_string(Strategy strategy) noexcept {
  for (const auto& [s, text] : kStrategyNames) {
    if (s == strategy) return text;
  }
  return "?";
}

bool uses_dynamic_budgets(Strategy strategy) noexcept {
  return strategy == Strategy::kInsCL || strategy == Strategy::kDynamicRandom;
}

Allocation allocate_budgets(std::span<const std::pair<std::string, double>> distances,
                            std::int64_t total_budget) {
  if (total_budget < 0) fail(ErrorKind::kValidation, "total budget must be nonnegative");
  std::vector<double> weights;
  std::vector<std::string> keys;
  for (const auto& [task_id, d] : distances) {
    keys.push_back(task_id);
    weights.push_back(d);
  }
  Allocation out;
  out.equal_split = !weights.empty() &&
                    std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
  const auto units = largest_remainder(weights, total_budget, keys);
  for (std::size_t i = 0; i < keys.size(); ++i) out.budgets.push_back({keys[i], units[i]});
  return out;
}

SampleResult insinfo_sample(const corpus::TaskDataset& task, std::int64_t budget,
                            const taginfo::InstructionPool& pool, std::uint64_t seed) {
  if (budget < 0) fail(ErrorKind::kValidation, "replay budget must be nonnegative");
  SampleResult out;
  const auto size = static_cast<std::int64_t>(task.size());
  if (budget > size) {
    out.clamped = true;
    budget = size;
  }

  std::vector<double> scores;
  std::vector<std::int64_t> capacities;
  std::vector<std::string> keys;
  for (const corpus::HistogramEntry& h : task.histogram()) {
    scores.push_back(taginfo::insinfo(h.instruction, pool));
    capacities.push_back(static_cast<std::int64_t>(h.count));
    keys.push_back(h.instruction);
  }
  const auto quotas = apportion_with_capacity(scores, budget, capacities, keys);

  Rng rng(seed);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    out.quotas.push_back({keys[k], scores[k], quotas[k]});
    const auto& bucket = task.bucket(keys[k]);
    for (std::size_t idx : rng.sample_indices(bucket.size(), static_cast<std::size_t>(quotas[k]))) {
      out.ids.push_back(task.instances()[bucket[idx]].id);
    }
  }
  return out;
}

Json ReplayPlan::to_json() const {
  Json doc;
  doc["stage"] = stage;
  doc["strategy"] = to_string(strategy);
  doc["mode"] = transport::to_string(mode);
  doc["method"] = transport::to_string(method);
  doc["alpha_per_task"] = alpha_per_task;
  doc["seed"] = seed;
  doc["total_budget"] = total_budget;
  doc["pool_total"] = pool_total;
  Json dist = Json::object();
  for (const TaskDistance& d : distances) dist[d.task_id] = d.value;
  doc["distances"] = std::move(dist);
  const auto budgets_json = [](const std::vector<TaskBudget>& budgets) {
    Json b = Json::object();
    for (const TaskBudget& t : budgets) b[t.task_id] = t.budget;
    return b;
  };
  doc["task_budgets"] = budgets_json(task_budgets);
  doc["effective_budgets"] = budgets_json(effective_budgets);
  Json quotas = Json::object();
  for (const TaskQuotas& t : instruction_quotas) {
    Json q = Json::object();
    for (const auto& [instruction, count] : t.quotas) q[instruction] = count;
    quotas[t.task_id] = std::move(q);
  }
  doc["instruction_quotas"] = std::move(quotas);
  doc["sampled_ids"] = sampled_ids;
  doc["warnings"] = warnings;
  return doc;
}

StageDataset build_stage_dataset(const StageInputs& in, const StageOptions& options) {
  if (options.alpha_per_task <= 0) fail(ErrorKind::kValidation, "alpha_per_task must be positive");
  if (in.current.empty()) fail(ErrorKind::kValidation, "current task is empty");

  StageDataset out;
  ReplayPlan& plan = out.plan;
  plan.stage = in.previous.size() + 1;
  plan.strategy = options.strategy;
  plan.mode = options.distance.mode;
  plan.method = options.distance.method;
  plan.alpha_per_task = options.alpha_per_task;
  plan.seed = options.seed;
  plan.total_budget = static_cast<std::int64_t>(in.previous.size()) * options.alpha_per_task;
  plan.pool_total = in.pool.total();

  for (const corpus::Instance& inst : in.current.instances()) out.rows.push_back({inst, std::nullopt});
  if (in.previous.empty()) return out;

  std::vector<std::pair<std::string, double>> distances;
  std::vector<std::string> keys;
  std::vector<std::int64_t> capacities;
  for (const corpus::TaskDataset& prev : in.previous) {
    if (prev.task_id() == in.current.task_id()) {
      fail(ErrorKind::kValidation, "task " + prev.task_id() + " is both current and previous");
    }
    const transport::Distance d =
        transport::task_distance(prev, in.current, in.embeddings, options.distance);
    plan.distances.push_back({prev.task_id(), d.value, d.converged});
    if (!d.converged) {
      plan.warnings.push_back("sinkhorn did not converge for task " + prev.task_id());
    }
    distances.emplace_back(prev.task_id(), d.value);
    keys.push_back(prev.task_id());
    capacities.push_back(static_cast<std::int64_t>(prev.size()));
  }

  std::vector<double> weights;
  if (uses_dynamic_budgets(options.strategy)) {
    const Allocation alloc = allocate_budgets(distances, plan.total_budget);
    plan.task_budgets = alloc.budgets;
    if (alloc.equal_split) {
      plan.warnings.push_back("all distances are zero; budget split equally");
    }
    for (const auto& [task_id, d] : distances) weights.push_back(d);
  } else {
    weights.assign(keys.size(), 1.0);
    const auto units = largest_remainder(weights, plan.total_budget, keys);
    for (std::size_t j = 0; j < keys.size(); ++j) plan.task_budgets.push_back({keys[j], units[j]});
  }

  const auto effective = apportion_with_capacity(weights, plan.total_budget, capacities, keys);
  for (std::size_t j = 0; j < keys.size(); ++j) {
    plan.effective_budgets.push_back({keys[j], effective[j]});
    if (plan.task_budgets[j].budget > capacities[j]) {
      plan.warnings.push_back("budget " + std::to_string(plan.task_budgets[j].budget) +
                              " for task " + keys[j] + " exceeds its " +
                              std::to_string(capacities[j]) + " instances; clamped");
    }
  }

  for (std::size_t j = 0; j < in.previous.size(); ++j) {
    const corpus::TaskDataset& prev = in.previous[j];
    const std::uint64_t seed = derive_seed(options.seed, to_string(options.strategy), prev.task_id());
    const std::vector<std::string> ids = select(options.strategy, prev, effective[j], in, seed);

    std::map<std::string_view, std::size_t> position;
    for (std::size_t i = 0; i < prev.size(); ++i) position.emplace(prev.instances()[i].id, i);
    std::map<std::string_view, std::int64_t> per_instruction;
    for (const std::string& id : ids) {
      const corpus::Instance& inst = prev.instances()[position.at(id)];
      ++per_instruction[inst.instruction];
      out.rows.push_back({inst, prev.task_id()});
      plan.sampled_ids.push_back(id);
    }
    TaskQuotas tq{prev.task_id(), {}};
    for (const corpus::HistogramEntry& h : prev.histogram()) {
      const auto it = per_instruction.find(h.instruction);
      tq.quotas.emplace_back(h.instruction, it == per_instruction.end() ? 0 : it->second);
    }
    plan.instruction_quotas.push_back(std::move(tq));
  }
  return out;
}

std::string serialize_augmented(std::span<const AugmentedRow> rows) {
  std::string out;
  for (const AugmentedRow& row : rows) {
    Json record;
    record["id"] = row.instance.id;
    record["task_id"] = row.instance.task_id;
    record["instruction"] = row.instance.instruction;
    record["input"] = row.instance.input;
    record["output"] = row.instance.output;
    if (row.replay_of) record["replay_of"] = *row.replay_of;
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace instreplay::replay
