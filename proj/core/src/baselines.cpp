// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "instreplay/error.hpp"
#include "instreplay/rng.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::baselines {

namespace {

std::size_t clamp_budget(const corpus::TaskDataset& task, std::int64_t budget) {
  if (budget < 0) fail(ErrorKind::kValidation, "replay budget must be nonnegative");
  return std::min(static_cast<std::size_t>(budget), task.size());
}

// Uniformly draws `want` positions from `candidates`, appending ids to `out`.
void draw(const corpus::TaskDataset& task, const std::vector<std::size_t>& candidates,
          std::size_t want, Rng& rng, std::vector<std::string>& out) {
  for (std::size_t idx : rng.sample_indices(candidates.size(), want)) {
    out.push_back(task.instances()[candidates[idx]].id);
  }
}

}  // namespace

std::vector<std::string> random_replay(const corpus::TaskDataset& task, std::int64_t budget,
                                       std::uint64_t seed) {
  const std::size_t want = clamp_budget(task, budget);
  Rng rng(seed);
  std::vector<std::string> out;
  out.reserve(want);
  for (std::size_t idx : rng.sample_indices(task.size(), want)) {
    out.push_back(task.instances()[idx].id);
  }
  return out;
}

std::vector<std::string> prototype_data(const corpus::TaskDataset& task, std::int64_t budget,
                                        const corpus::EmbeddingTable& instance_embeddings,
                                        std::uint64_t seed, PrototypeOrder order) {
  const std::size_t want = clamp_budget(task, budget);
  if (want == 0) return {};

  PointSet points;
  points.reserve(task.size());
  for (const corpus::Instance& inst : task.instances()) points.push_back(instance_embeddings.at(inst.id));
  const ClusterModel model = kmeans_cosine(points, task.histogram().size(), seed);

  struct Scored {
    double distance;
    const std::string* id;
  };
  std::vector<Scored> scored;
  scored.reserve(task.size());
  for (std::size_t i = 0; i < task.size(); ++i) {
    scored.push_back({transport::cosine_distance(points[i], model.centers[model.assignment[i]]),
                      &task.instances()[i].id});
  }
  std::sort(scored.begin(), scored.end(), [order](const Scored& a, const Scored& b) {
    if (a.distance != b.distance) {
      return order == PrototypeOrder::kFarthestFirst ? a.distance > b.distance
                                                     : a.distance < b.distance;
    }
    return *a.id < *b.id;
  });

  std::vector<std::string> out;
  out.reserve(want);
  for (std::size_t i = 0; i < want; ++i) out.push_back(*scored[i].id);
  return out;
}

PrototypeSelection select_prototype_instructions(const corpus::TaskDataset& task,
                                                 const corpus::EmbeddingTable& embeddings,
                                                 std::uint64_t seed) {
  std::vector<std::string> instructions = task.instructions();
  std::sort(instructions.begin(), instructions.end());
  PrototypeSelection out;
  const std::size_t n = instructions.size();
  if (n <= 2) {
    embeddings.require(instructions);
    out.k = n;
    out.prototypes = instructions;
    return out;
  }

  PointSet points;
  for (const std::string& ins : instructions) points.push_back(embeddings.at(ins));

  ClusterModel best;
  double best_score = -std::numeric_limits<double>::infinity();
  const std::size_t k_max = std::min(kMaxSilhouetteClusters, n - 1);
  for (std::size_t k = 2; k <= k_max; ++k) {
    ClusterModel model = kmeans_cosine(points, k, derive_seed(seed, "silhouette", std::to_string(k)));
    const double score = silhouette_cosine(points, model.assignment, model.k);
    out.silhouettes.emplace_back(k, score);
    if (score > best_score) {
      best_score = score;
      best = std::move(model);
    }
  }
  out.k = best.k;

  for (std::size_t c = 0; c < best.k; ++c) {
    std::size_t pick = n;
    double pick_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (best.assignment[i] != c) continue;
      // Sorted order makes the first strict minimum the lexicographic tie-break.
      const double d = transport::cosine_distance(points[i], best.centers[c]);
      if (d < pick_d) {
        pick_d = d;
        pick = i;
      }
    }
    if (pick < n) out.prototypes.push_back(instructions[pick]);
  }
  std::sort(out.prototypes.begin(), out.prototypes.end());
  return out;
}

std::vector<std::string> prototype_instruction(const corpus::TaskDataset& task,
                                               std::int64_t budget,
                                               const corpus::EmbeddingTable& embeddings,
                                               std::uint64_t seed) {
  const std::size_t want = clamp_budget(task, budget);
  const PrototypeSelection selection = select_prototype_instructions(task, embeddings, seed);

  std::vector<bool> prototypical(task.size(), false);
  for (const std::string& ins : selection.prototypes) {
    for (std::size_t idx : task.bucket(ins)) prototypical[idx] = true;
  }
  std::vector<std::size_t> primary;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < task.size(); ++i) (prototypical[i] ? primary : rest).push_back(i);

  Rng rng(derive_seed(seed, "prototype-fill"));
  std::vector<std::string> out;
  out.reserve(want);
  const std::size_t first = std::min(want, primary.size());
  draw(task, primary, first, rng, out);
  draw(task, rest, want - first, rng, out);
  return out;
}

std::vector<DiverseColumn> diverse_ranking(std::span<const std::string> previous_instructions,
                                           std::span<const std::string> current_instructions,
                                           const corpus::EmbeddingTable& embeddings) {
  if (current_instructions.empty()) {
    fail(ErrorKind::kValidation, "diverse instruction needs at least one current instruction");
  }
  // Fixed row order keeps column sums bit-identical under row permutations.
  std::vector<std::string> rows(current_instructions.begin(), current_instructions.end());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  std::vector<DiverseColumn> out;
  out.reserve(previous_instructions.size());
  for (const std::string& col : previous_instructions) {
    const auto v = embeddings.at(col);
    double sum = 0.0;
    for (const std::string& row : rows) sum += transport::cosine_similarity(embeddings.at(row), v);
    out.push_back({col, sum});
  }
  std::sort(out.begin(), out.end(), [](const DiverseColumn& a, const DiverseColumn& b) {
    if (a.column_sum != b.column_sum) return a.column_sum < b.column_sum;
    return a.instruction < b.instruction;
  });
  return out;
}

std::vector<std::string> diverse_instruction(const corpus::TaskDataset& task, std::int64_t budget,
                                             std::span<const std::string> current_instructions,
                                             const corpus::EmbeddingTable& embeddings,
                                             std::uint64_t seed) {
  const std::size_t want = clamp_budget(task, budget);
  const std::vector<std::string> columns = task.instructions();
  const auto ranking = diverse_ranking(columns, current_instructions, embeddings);

  Rng rng(seed);
  std::vector<std::string> out;
  out.reserve(want);
  for (const DiverseColumn& column : ranking) {
    if (out.size() == want) break;
    const auto& bucket = task.bucket(column.instruction);
    draw(task, bucket, std::min(want - out.size(), bucket.size()), rng, out);
  }
  return out;
}

}  // namespace instreplay::baselines
