// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "expect_error.hpp"
#include "generators.hpp"
#include "instreplay/taginfo.hpp"
#include "oracles.hpp"

namespace instreplay::taginfo {
namespace {

using testing::error_of;

TEST(NormalizeRule, Examples) {
  EXPECT_EQ(normalize_rule("Cosplay"), "cosplay");
  const IdentityLemmatizer identity;
  EXPECT_EQ(normalize_rule("Spelling & Grammar-Check", identity), "spelling grammar check");
  EXPECT_EQ(normalize_rule("  math   "), "math");
  EXPECT_EQ(normalize_rule("!!!"), "");
  EXPECT_EQ(normalize_rule(""), "");
  EXPECT_EQ(normalize_rule("Über_Café", identity), "über café");
}

TEST(NormalizeRule, DefaultLemmatizer) {
  EXPECT_EQ(normalize_rule("Writing Stories"), "write story");
  EXPECT_EQ(normalize_rule("classified boxes"), "classify box");
  EXPECT_EQ(normalize_rule("Solving Math-Problems"), "solve math problem");
  EXPECT_EQ(normalize_rule("running analyses"), "run analysis");
  EXPECT_EQ(normalize_rule("question answering"), "question answer");
}

TEST(Lemmatizer, SuffixRules) {
  const SuffixLemmatizer lem;
  EXPECT_EQ(lem.lemmatize("classes"), "class");
  EXPECT_EQ(lem.lemmatize("studies"), "study");
  EXPECT_EQ(lem.lemmatize("ties"), "tie");
  EXPECT_EQ(lem.lemmatize("boxes"), "box");
  EXPECT_EQ(lem.lemmatize("matches"), "match");
  EXPECT_EQ(lem.lemmatize("tags"), "tag");
  EXPECT_EQ(lem.lemmatize("status"), "status");
  EXPECT_EQ(lem.lemmatize("hopping"), "hop");
  EXPECT_EQ(lem.lemmatize("creating"), "create");
  EXPECT_EQ(lem.lemmatize("debugged"), "debug");
  EXPECT_EQ(lem.lemmatize("copied"), "copy");
  EXPECT_EQ(lem.lemmatize("tied"), "tie");
  EXPECT_EQ(lem.lemmatize("agreed"), "agreed");
  EXPECT_EQ(lem.lemmatize("sing"), "sing");
  EXPECT_EQ(lem.lemmatize("bus"), "bus");
  EXPECT_EQ(lem.lemmatize("v2"), "v2");
}

TEST(NormalizeRule, PropertyIdempotent) {
  Rng rng(1);
  for (int t = 0; t < 3000; ++t) {
    const std::string raw = testing::random_tag(rng);
    const std::string once = normalize_rule(raw);
    ASSERT_EQ(normalize_rule(once), once) << "raw: " << raw;
    EXPECT_EQ(once.find("  "), std::string::npos);
    if (!once.empty()) {
      EXPECT_NE(once.front(), ' ');
      EXPECT_NE(once.back(), ' ');
    }
  }
}

TEST(SemanticAggregate, Examples) {
  // Cosine distance 0.05 between "b" and "a".
  const double c = 0.95;
  const auto table = testing::table_from({"b", "a", "z"}, {{1, 0, 0}, {c, std::sqrt(1 - c * c), 0}, {0, 0, 1}});
  const std::vector<std::string> tags = {"b", "a", "z"};
  const auto map = semantic_aggregate(tags, table, 0.1);
  EXPECT_EQ(map.at("b"), "a");
  EXPECT_EQ(map.at("a"), "a");
  EXPECT_EQ(map.at("z"), "z");

  const auto far = semantic_aggregate(tags, table, 0.01);
  for (const auto& [tag, rep] : far) EXPECT_EQ(tag, rep);

  EXPECT_TRUE(semantic_aggregate(std::vector<std::string>{}, table, 0.1).empty());
  const std::vector<std::string> ghost = {"a", "ghost"};
  EXPECT_EQ(error_of([&] { semantic_aggregate(ghost, table, 0.1); }), "missing-embedding");
  EXPECT_EQ(error_of([&] { semantic_aggregate(tags, table, 1.5); }), "validation");
}

TEST(SemanticAggregate, ChainsThroughCorePoints) {
  // a-b and b-c are neighbours, a-c are not: density reachability joins all.
  const auto angle = [](double x) { return std::vector<double>{std::cos(x), std::sin(x)}; };
  const double step = std::acos(1 - 0.08);
  const auto table = testing::table_from({"c", "b", "a"}, {angle(2 * step), angle(step), angle(0)});
  const std::vector<std::string> tags = {"c", "b", "a"};
  const auto map = semantic_aggregate(tags, table, 0.1);
  EXPECT_EQ(map.at("c"), "a");
  EXPECT_EQ(map.at("b"), "a");
}

TEST(SemanticAggregate, PropertyMatchesComponentsAndIdempotent) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(20);
    const auto centers = testing::random_vectors(rng, 1 + rng.below(5), 4);
    std::vector<std::string> names;
    testing::Dense vecs;
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back("t" + std::to_string(rng.below(500)) + "_" + std::to_string(i));
      vecs.push_back(testing::jitter(rng, centers[rng.below(centers.size())], 0.05 + 0.4 * rng.uniform()));
    }
    const auto table = testing::table_from(names, vecs);
    const auto map = semantic_aggregate(names, table, 0.1);
    const auto oracle = testing::threshold_components(names, vecs, 0.1);
    const std::map<std::string, std::string> got(map.begin(), map.end());
    EXPECT_EQ(got, oracle);
    for (const auto& [tag, rep] : map) EXPECT_EQ(map.at(rep), rep);
  }
}

TEST(Canonicalizer, RuleThenSemantic) {
  const corpus::TagTable raw = {{"i1", {"Math Problems", "Coding!"}}, {"i2", {"math-problem", "code"}}};
  const auto table = testing::table_from({"math problem", "coding", "code"}, {{1, 0}, {0, 1}, {0.01, 1}});
  const auto canon = TagCanonicalizer::build(raw, &table, 0.1);
  EXPECT_EQ(canon.canonical("MATH PROBLEMS"), "math problem");
  EXPECT_EQ(canon.canonical("Coding"), "code");
  EXPECT_EQ(canon.canonical("unseen tag"), "unseen tag");
  const std::vector<std::string> list = {"code", "Coding", "", "!!", "Math Problem"};
  EXPECT_EQ(canon.canonicalize(list), (std::vector<std::string>{"code", "math problem"}));
  const auto applied = canon.apply(raw);
  EXPECT_EQ(applied.at("i1"), (std::vector<std::string>{"math problem", "code"}));
  // Applying twice changes nothing.
  EXPECT_EQ(canon.apply(applied), applied);

  const auto rule_only = TagCanonicalizer::build(raw, nullptr);
  EXPECT_EQ(rule_only.canonical("Coding"), "code");
  EXPECT_TRUE(rule_only.semantic_map().empty());
}

}  // namespace
}  // namespace instreplay::taginfo
