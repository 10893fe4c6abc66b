// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "instreplay/corpus.hpp"
#include "instreplay/kmeans.hpp"

namespace instreplay::baselines {

// Every strategy returns exactly min(budget, |task|) distinct instance ids.
// A negative budget is a validation error.

// Uniform sample without replacement.
std::vector<std::string> random_replay(const corpus::TaskDataset& task, std::int64_t budget,
                                       std::uint64_t seed);

enum class PrototypeOrder { kFarthestFirst, kNearestFirst };

// k-means over instance embeddings (keyed by instance id) with k = number of
// distinct instructions; instances ranked by cosine distance to their own
// center, farthest first by default, ties by id.
std::vector<std::string> prototype_data(const corpus::TaskDataset& task, std::int64_t budget,
                                        const corpus::EmbeddingTable& instance_embeddings,
                                        std::uint64_t seed,
                                        PrototypeOrder order = PrototypeOrder::kFarthestFirst);

struct PrototypeSelection {
  std::size_t k = 0;
  std::vector<std::string> prototypes;  // sorted
  // (k, mean silhouette) for every k tried; empty when the search was skipped.
  std::vector<std::pair<std::size_t, double>> silhouettes;
};

inline constexpr std::size_t kMaxSilhouetteClusters = 10;

// Clusters the task's distinct instructions for k in [2, min(10, n - 1)] and
// keeps the k with the best mean silhouette (ties to smaller k). Per cluster,
// the instruction nearest its center is prototypical. Two instructions force
// k = 2; one instruction is its own prototype.
PrototypeSelection select_prototype_instructions(const corpus::TaskDataset& task,
                                                 const corpus::EmbeddingTable& embeddings,
                                                 std::uint64_t seed);

// Uniform sample from instances bearing prototypical instructions, topped up
// uniformly from the remaining instances when those run out.
std::vector<std::string> prototype_instruction(const corpus::TaskDataset& task,
                                               std::int64_t budget,
                                               const corpus::EmbeddingTable& embeddings,
                                               std::uint64_t seed);

struct DiverseColumn {
  std::string instruction;
  double column_sum = 0.0;
};

// Previous-task instructions by ascending column sum of the cosine similarity
// matrix (rows: current instructions, columns: previous instructions), ties
// by instruction text.
std::vector<DiverseColumn> diverse_ranking(std::span<const std::string> previous_instructions,
                                           std::span<const std::string> current_instructions,
                                           const corpus::EmbeddingTable& embeddings);

// Samples from the most diverse instruction's instances first, then the next
// least similar, until the budget is met.
std::vector<std::string> diverse_instruction(const corpus::TaskDataset& task, std::int64_t budget,
                                             std::span<const std::string> current_instructions,
                                             const corpus::EmbeddingTable& embeddings,
                                             std::uint64_t seed);

}  // namespace instreplay::baselines
