// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <set>

#include "expect_error.hpp"
#include "generators.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/replay.hpp"

namespace instreplay::replay {
namespace {

using testing::error_of;

using Distances = std::vector<std::pair<std::string, double>>;

std::vector<std::int64_t> budgets(const Allocation& a) {
  std::vector<std::int64_t> out;
  for (const auto& b : a.budgets) out.push_back(b.budget);
  return out;
}

taginfo::TagCanonicalizer identity() {
  return taginfo::TagCanonicalizer({}, 0.1, std::make_shared<taginfo::IdentityLemmatizer>());
}

TEST(AllocateBudgets, Examples) {
  EXPECT_EQ(budgets(allocate_budgets(Distances{{"a", 0.5}, {"b", 0.5}}, 400)), (std::vector<std::int64_t>{200, 200}));
  EXPECT_EQ(budgets(allocate_budgets(Distances{{"a", 1}, {"b", 3}}, 400)), (std::vector<std::int64_t>{100, 300}));
  EXPECT_EQ(budgets(allocate_budgets(Distances{{"a", 1}, {"b", 2}}, 200)), (std::vector<std::int64_t>{67, 133}));
  EXPECT_EQ(budgets(allocate_budgets(Distances{{"a", 0}, {"b", 0.7}}, 400)), (std::vector<std::int64_t>{0, 400}));
  EXPECT_TRUE(allocate_budgets(Distances{}, 400).budgets.empty());
}

TEST(AllocateBudgets, AllZeroFallsBackToEqualSplit) {
  const auto a = allocate_budgets(Distances{{"a", 0}, {"b", 0}, {"c", 0}}, 400);
  EXPECT_TRUE(a.equal_split);
  EXPECT_EQ(budgets(a), (std::vector<std::int64_t>{134, 133, 133}));
  EXPECT_FALSE(allocate_budgets(Distances{{"a", 1}}, 5).equal_split);
}

TEST(AllocateBudgets, PropertyMonotoneAndScaleInvariant) {
  Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    Distances d;
    for (std::size_t j = 0, n = 1 + rng.below(8); j < n; ++j) d.emplace_back("t" + std::to_string(j), rng.uniform());
    const auto total = static_cast<std::int64_t>(rng.below(3000));
    const auto base = budgets(allocate_budgets(d, total));
    EXPECT_EQ(std::accumulate(base.begin(), base.end(), std::int64_t{0}), total);
    for (std::size_t a = 0; a < d.size(); ++a) {
      for (std::size_t b = 0; b < d.size(); ++b) {
        if (d[a].second > d[b].second) EXPECT_GE(base[a], base[b]);
      }
    }
    for (double c : {1e-3, 7.0, 1e5}) {
      Distances scaled = d;
      for (auto& [id, w] : scaled) w *= c;
      EXPECT_EQ(budgets(allocate_budgets(scaled, total)), base);
    }
  }
}

struct Fixture {
  corpus::TaskDataset task;
  taginfo::InstructionPool pool;
};

// Two instructions whose InsInfo ratio is 3:1.
Fixture three_to_one(std::size_t a_count, std::size_t b_count) {
  // N = 8; "a" has tags with f = 1 (ln 8 each) x 3, "b" one such tag.
  Fixture f{testing::task_with_counts("t", {"a", "b"}, {a_count, b_count}), {}};
  corpus::TagTable tags = {{"a", {"r1", "r2", "r3"}}, {"b", {"r4"}}};
  std::vector<std::string> filler;
  for (int i = 0; i < 6; ++i) filler.push_back("f" + std::to_string(i));
  f.pool.add_task(f.task, tags, identity());
  f.pool.add_task(testing::task_with_counts("bg", filler, std::vector<std::size_t>(6, 1)), tags, identity());
  return f;
}

std::map<std::string, std::int64_t> quotas(const SampleResult& r) {
  std::map<std::string, std::int64_t> out;
  for (const auto& q : r.quotas) out[q.instruction] = q.quota;
  return out;
}

TEST(InsInfoSample, Examples) {
  {
    Fixture f{testing::task_with_counts("t", {"a", "b"}, {10, 10}), {}};
    f.pool.add_task(f.task, {{"a", {"x"}}, {"b", {"y"}}}, identity());
    const auto r = insinfo_sample(f.task, 10, f.pool, 1);
    EXPECT_EQ(quotas(r), (std::map<std::string, std::int64_t>{{"a", 5}, {"b", 5}}));
  }
  {
    const auto f = three_to_one(10, 10);
    const auto r = insinfo_sample(f.task, 8, f.pool, 1);
    EXPECT_NEAR(r.quotas[0].score, 3 * r.quotas[1].score, 1e-12);
    EXPECT_EQ(quotas(r), (std::map<std::string, std::int64_t>{{"a", 6}, {"b", 2}}));
    for (std::size_t i = 0; i < r.ids.size(); ++i) {
      const std::size_t n = std::stoul(r.ids[i].substr(2));
      EXPECT_EQ(n <= 10, i < 6) << r.ids[i];
    }
  }
  {
    // Quota 3 on a bucket of one: one taken, two move to the other.
    const auto f = three_to_one(1, 10);
    const auto r = insinfo_sample(f.task, 4, f.pool, 1);
    EXPECT_EQ(quotas(r), (std::map<std::string, std::int64_t>{{"a", 1}, {"b", 3}}));
    EXPECT_EQ(r.ids.size(), 4u);
  }
}

TEST(InsInfoSample, ZeroScoresAndClamp) {
  Fixture f{testing::task_with_counts("t", {"a", "b", "c"}, {4, 4, 4}), {}};
  f.pool.add_task(f.task, {}, identity());
  const auto r = insinfo_sample(f.task, 6, f.pool, 2);
  EXPECT_EQ(quotas(r), (std::map<std::string, std::int64_t>{{"a", 2}, {"b", 2}, {"c", 2}}));
  EXPECT_FALSE(r.clamped);
  const auto all = insinfo_sample(f.task, 100, f.pool, 2);
  EXPECT_TRUE(all.clamped);
  EXPECT_EQ(std::set<std::string>(all.ids.begin(), all.ids.end()).size(), 12u);
  EXPECT_EQ(error_of([&] { insinfo_sample(f.task, -1, f.pool, 2); }), "validation");
  const taginfo::InstructionPool empty;
  EXPECT_EQ(error_of([&] { insinfo_sample(f.task, 1, empty, 2); }), "lookup");
}

TEST(InsInfoSample, DeterministicUnderSeed) {
  const auto f = three_to_one(30, 30);
  EXPECT_EQ(insinfo_sample(f.task, 20, f.pool, 5).ids, insinfo_sample(f.task, 20, f.pool, 5).ids);
  EXPECT_NE(insinfo_sample(f.task, 20, f.pool, 5).ids, insinfo_sample(f.task, 20, f.pool, 6).ids);
}

struct World {
  std::vector<corpus::TaskDataset> tasks;
  corpus::EmbeddingTable emb;
  corpus::TagTable tags;
};

World world(std::uint64_t seed, std::size_t n_tasks, std::size_t per_task) {
  Rng rng(seed);
  World w;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < 3 * n_tasks; ++i) names.push_back("ins" + std::to_string(i));
  w.emb = testing::table_from(names, testing::random_vectors(rng, names.size(), 6));
  for (std::size_t t = 0; t < n_tasks; ++t) {
    const std::vector<std::string> own(names.begin() + 3 * t, names.begin() + 3 * t + 3);
    w.tasks.push_back(testing::random_task(rng, "task" + std::to_string(t), own, per_task));
    for (const auto& i : own) w.tags[i] = {"g" + std::to_string(rng.below(4)), "h" + std::to_string(rng.below(9))};
  }
  return w;
}

StageDataset stage(const World& w, std::size_t i, const StageOptions& opts) {
  taginfo::InstructionPool pool;
  for (std::size_t j = 0; j + 1 < i; ++j) pool.add_task(w.tasks[j], w.tags, identity());
  return build_stage_dataset({w.tasks[i - 1], std::span(w.tasks.data(), i - 1), w.emb, pool}, opts);
}

TEST(BuildStage, StageOneIsCurrentOnly) {
  const auto w = world(1, 3, 50);
  const auto s = stage(w, 1, {});
  EXPECT_EQ(s.plan.total_budget, 0);
  EXPECT_EQ(s.rows.size(), 50u);
  EXPECT_TRUE(s.plan.sampled_ids.empty());
  for (const auto& row : s.rows) EXPECT_FALSE(row.replay_of.has_value());
}

TEST(BuildStage, StageThreeBudget) {
  const auto w = world(2, 3, 500);
  const auto s = stage(w, 3, {});
  EXPECT_EQ(s.plan.stage, 3u);
  EXPECT_EQ(s.plan.total_budget, 400);
  EXPECT_EQ(s.plan.sampled_ids.size(), 400u);
  EXPECT_EQ(s.rows.size(), 900u);
  std::int64_t sum = 0;
  for (const auto& b : s.plan.task_budgets) sum += b.budget;
  EXPECT_EQ(sum, 400);
  EXPECT_EQ(std::set<std::string>(s.plan.sampled_ids.begin(), s.plan.sampled_ids.end()).size(), 400u);
  // Current rows first, then replay rows in task order.
  for (std::size_t i = 0; i < 500; ++i) EXPECT_FALSE(s.rows[i].replay_of.has_value());
  std::size_t last_task = 0;
  for (std::size_t i = 500; i < s.rows.size(); ++i) {
    const std::size_t t = std::stoul(s.rows[i].replay_of->substr(4));
    EXPECT_GE(t, last_task);
    last_task = t;
    EXPECT_EQ(s.rows[i].instance.task_id, *s.rows[i].replay_of);
  }
  // Quotas are counted from the sampled ids.
  for (std::size_t j = 0; j < 2; ++j) {
    std::int64_t q = 0;
    for (const auto& [ins, n] : s.plan.instruction_quotas[j].quotas) q += n;
    EXPECT_EQ(q, s.plan.effective_budgets[j].budget);
  }
}

TEST(BuildStage, IdenticalPreviousTaskGetsNothing) {
  World w = world(3, 2, 100);
  // A third task with exactly task0's instruction multiset.
  std::vector<corpus::Instance> copy;
  for (const auto& inst : w.tasks[0].instances()) {
    auto c = inst;
    c.id = "copy" + inst.id;
    c.task_id = "copy";
    copy.push_back(c);
  }
  w.tasks.emplace_back("copy", copy);
  const auto s = stage(w, 3, {});
  EXPECT_EQ(s.plan.distances[0].value, 0.0);
  EXPECT_EQ(s.plan.task_budgets[0].budget, 0);
  EXPECT_EQ(s.plan.task_budgets[1].budget, 400);
  EXPECT_EQ(s.plan.effective_budgets[1].budget, 100);
  EXPECT_EQ(s.plan.effective_budgets[0].budget, 100);  // surplus moves once task1 is exhausted
  EXPECT_FALSE(s.plan.warnings.empty());
}

TEST(BuildStage, StrategiesReplaySameTotals) {
  const auto w = world(4, 4, 300);
  for (std::size_t i = 1; i <= 4; ++i) {
    std::set<std::size_t> sizes;
    for (Strategy st : {Strategy::kInsCL, Strategy::kRandom, Strategy::kProtoInstruction, Strategy::kDiverse,
                        Strategy::kDynamicRandom, Strategy::kInsInfoOnly}) {
      StageOptions opts;
      opts.strategy = st;
      opts.seed = 8;
      sizes.insert(stage(w, i, opts).plan.sampled_ids.size());
    }
    EXPECT_EQ(sizes, (std::set<std::size_t>{(i - 1) * 200}));
  }
}

TEST(BuildStage, EqualBudgetStrategiesIgnoreDistance) {
  const auto w = world(5, 3, 300);
  StageOptions opts;
  opts.strategy = Strategy::kRandom;
  const auto s = stage(w, 3, opts);
  EXPECT_EQ(s.plan.task_budgets[0].budget, 200);
  EXPECT_EQ(s.plan.task_budgets[1].budget, 200);
}

TEST(BuildStage, DeterministicPlanJson) {
  const auto w = world(6, 3, 200);
  StageOptions opts;
  opts.seed = 99;
  const std::string a = io::dump(stage(w, 3, opts).plan.to_json());
  const std::string b = io::dump(stage(w, 3, opts).plan.to_json());
  EXPECT_EQ(a, b);
  opts.seed = 100;
  EXPECT_NE(io::dump(stage(w, 3, opts).plan.to_json()), a);
}

TEST(BuildStage, Errors) {
  const auto w = world(7, 2, 20);
  StageOptions opts;
  opts.alpha_per_task = 0;
  EXPECT_EQ(error_of([&] { stage(w, 2, opts); }), "validation");
  opts = {};
  opts.strategy = Strategy::kProtoData;
  EXPECT_EQ(error_of([&] { stage(w, 2, opts); }), "validation");
}

TEST(Augmented, SerializesReplaySource) {
  const corpus::Instance inst{"i1", "t", "ins", "in", "out"};
  const std::vector<AugmentedRow> rows = {{inst, std::nullopt}, {inst, std::string("t")}};
  const std::string text = serialize_augmented(rows);
  EXPECT_EQ(text,
            "{\"id\":\"i1\",\"task_id\":\"t\",\"instruction\":\"ins\",\"input\":\"in\",\"output\":\"out\"}\n"
            "{\"id\":\"i1\",\"task_id\":\"t\",\"instruction\":\"ins\",\"input\":\"in\",\"output\":\"out\","
            "\"replay_of\":\"t\"}\n");
}

TEST(Strategy, Names) {
  for (Strategy s : {Strategy::kInsCL, Strategy::kRandom, Strategy::kProtoData, Strategy::kProtoInstruction,
                     Strategy::kDiverse, Strategy::kDynamicRandom, Strategy::kInsInfoOnly}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_TRUE(uses_dynamic_budgets(Strategy::kInsCL));
  EXPECT_FALSE(uses_dynamic_budgets(Strategy::kRandom));
  EXPECT_EQ(error_of([] { parse_strategy("nope"); }), "validation");
}

}  // namespace
}  // namespace instreplay::replay
