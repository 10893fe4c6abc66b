// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <memory>
#include <set>

#include "expect_error.hpp"
#include "generators.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/taginfo.hpp"

namespace instreplay::taginfo {
namespace {

using testing::error_of;

TagCanonicalizer identity() {
  return TagCanonicalizer({}, kDefaultClusterThreshold, std::make_shared<IdentityLemmatizer>());
}

corpus::TaskDataset one_each(const std::string& id, const std::vector<std::string>& ins) {
  return testing::task_with_counts(id, ins, std::vector<std::size_t>(ins.size(), 2));
}

TEST(InsInfo, Examples) {
  InstructionPool pool;
  const corpus::TagTable tags = {{"i0", {"x", "y"}}, {"i1", {"x"}}, {"i2", {"y"}}, {"i3", {"y"}},
                                 {"i4", {"y"}},      {"i5", {}},    {"i6", {"q"}}, {"i7", {"q"}}};
  pool.add_task(one_each("t", {"i0", "i1", "i2", "i3", "i4", "i5", "i6", "i7"}), tags, identity());
  EXPECT_EQ(pool.total(), 8u);
  EXPECT_NEAR(insinfo("i0", pool), std::log(4.0) + std::log(2.0), 1e-12);
  EXPECT_NEAR(insinfo("i0", pool), 2.07944, 1e-5);
  EXPECT_EQ(insinfo("i5", pool), 0.0);
  EXPECT_EQ(error_of([&] { insinfo("absent", pool); }), "lookup");

  InstructionPool all_same;
  all_same.add_task(one_each("t", {"a", "b"}), {{"a", {"t"}}, {"b", {"t"}}}, identity());
  EXPECT_EQ(insinfo("a", all_same), 0.0);
}

TEST(InsInfo, MissingTagsAreEmpty) {
  InstructionPool pool;
  pool.add_task(one_each("t", {"a", "b"}), {{"a", {"x"}}}, identity());
  EXPECT_TRUE(pool.at("b").tags.empty());
  EXPECT_EQ(insinfo("b", pool), 0.0);
  EXPECT_NEAR(insinfo("a", pool), std::log(2.0), 1e-15);
}

TEST(Pool, DuplicateTagsCountOnce) {
  InstructionPool pool;
  pool.add_task(one_each("t", {"a", "b"}), {{"a", {"x", "x", "X"}}, {"b", {"y"}}},
                TagCanonicalizer::build({}, nullptr));
  EXPECT_EQ(pool.at("a").tags, (std::vector<std::string>{"x"}));
  EXPECT_EQ(pool.frequency("x"), 1u);
  EXPECT_NEAR(insinfo("a", pool), std::log(2.0), 1e-15);
}

TEST(UpdatePool, Examples) {
  InstructionPool pool;
  pool = update_pool(pool, one_each("t1", {"a"}), {{"a", {"new"}}}, identity());
  EXPECT_EQ(pool.total(), 1u);
  EXPECT_EQ(pool.frequency("new"), 1u);

  const corpus::TagTable shared = {{"p", {"s"}}, {"q", {"s"}}, {"r", {"s"}}};
  InstructionPool three;
  three.add_task(one_each("t2", {"p", "q", "r"}), shared, identity());
  EXPECT_EQ(three.frequency("s"), 3u);
  EXPECT_EQ(three.frequency("none"), 0u);
}

TEST(UpdatePool, OldScoresChangeOnlyThroughCounts) {
  const corpus::TagTable tags = {{"a", {"x", "y"}}, {"b", {"y"}}, {"c", {"x", "z"}}, {"d", {"w"}}};
  InstructionPool pool;
  pool.add_task(one_each("t1", {"a", "b"}), tags, identity());
  const double before = insinfo("a", pool);
  EXPECT_NEAR(before, std::log(2.0 / 1.0) + std::log(2.0 / 2.0), 1e-15);
  pool.add_task(one_each("t2", {"c", "d"}), tags, identity());
  // N = 4, f(x) = 2, f(y) = 2.
  EXPECT_NEAR(insinfo("a", pool), std::log(4.0 / 2.0) + std::log(4.0 / 2.0), 1e-15);
  EXPECT_EQ(pool.at("a").tags, (std::vector<std::string>{"x", "y"}));
}

TEST(UpdatePool, SharedInstructionsAndErrors) {
  const corpus::TagTable tags = {{"a", {"x"}}, {"b", {"y"}}};
  InstructionPool pool;
  pool.add_task(one_each("t1", {"a"}), tags, identity());
  pool.add_task(one_each("t2", {"a", "b"}), tags, identity());
  EXPECT_EQ(pool.total(), 2u);
  EXPECT_EQ(pool.frequency("x"), 1u);
  EXPECT_EQ(pool.at("a").tasks, (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(pool.task_instructions("t2"), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(pool.has_task("t1"));
  EXPECT_EQ(error_of([&] { pool.add_task(one_each("t1", {"a"}), tags, identity()); }), "state");
}

TEST(Pool, PropertyConsistentUnderRandomInsertions) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    corpus::TagTable tags;
    std::vector<std::string> instructions;
    for (int i = 0; i < 15; ++i) {
      const std::string ins = "ins" + std::to_string(i);
      instructions.push_back(ins);
      std::vector<std::string> list;
      for (std::size_t k = rng.below(4); k > 0; --k) list.push_back("tag" + std::to_string(rng.below(6)));
      tags[ins] = list;
    }
    InstructionPool pool;
    for (int task = 0; task < 5; ++task) {
      std::vector<std::string> picks;
      for (auto i : rng.sample_indices(instructions.size(), 1 + rng.below(5))) picks.push_back(instructions[i]);
      pool.add_task(one_each("task" + std::to_string(task), picks), tags, identity());
      pool.check_consistency();
      std::map<std::string, std::size_t> recount;
      for (const auto& [ins, entry] : pool.entries()) {
        for (const auto& tag : std::set<std::string>(entry.tags.begin(), entry.tags.end())) ++recount[tag];
      }
      const std::map<std::string, std::size_t> freq(pool.frequencies().begin(), pool.frequencies().end());
      EXPECT_EQ(freq, recount);
      for (const auto& [tag, f] : pool.frequencies()) {
        EXPECT_GE(f, 1u);
        EXPECT_LE(f, pool.total());
      }
      for (const auto& [ins, entry] : pool.entries()) EXPECT_GE(insinfo(ins, pool), 0.0);
    }
  }
}

TEST(Pool, PersistenceRoundTrip) {
  const corpus::TagTable tags = {{"a", {"x", "y"}}, {"b", {"y"}}, {"c", {}}};
  InstructionPool pool;
  pool.add_task(one_each("t1", {"a", "b"}), tags, identity());
  pool.add_task(one_each("t2", {"c", "a"}), tags, identity());
  const auto dir = std::filesystem::temp_directory_path() / "instreplay_pool_test";
  save_pool(pool, dir / "pool.json");
  const auto loaded = load_pool(dir / "pool.json");
  EXPECT_EQ(loaded, pool);
  const std::string first = io::read_file(dir / "pool.json");
  save_pool(loaded, dir / "pool.json");
  EXPECT_EQ(io::read_file(dir / "pool.json"), first);
  const auto doc = pool.to_json();
  EXPECT_EQ(doc.at("total"), 3);
  EXPECT_EQ(doc.at("freq").at("y"), 2);
  std::filesystem::remove_all(dir);
}

TEST(Pool, RejectsInconsistentJson) {
  auto doc = InstructionPool().to_json();
  doc["total"] = 5;
  EXPECT_NE(error_of([&] { InstructionPool::from_json(doc); }), "none");
}

}  // namespace
}  // namespace instreplay::taginfo
