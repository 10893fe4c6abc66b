// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "instreplay/rng.hpp"

namespace instreplay {
namespace {

TEST(DeriveSeed, StableAndNameSensitive) {
  EXPECT_EQ(derive_seed(42, "insinfo", "a"), derive_seed(42, "insinfo", "a"));
  EXPECT_NE(derive_seed(42, "insinfo", "a"), derive_seed(42, "insinfo", "b"));
  EXPECT_NE(derive_seed(42, "insinfo", "a"), derive_seed(43, "insinfo", "a"));
  EXPECT_NE(derive_seed(42, "random", "a"), derive_seed(42, "insinfo", "a"));
  // Component and name are not simply concatenated.
  EXPECT_NE(derive_seed(1, "ab", "c"), derive_seed(1, "a", "bc"));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, BelowAndUniformRanges) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(rng.below(13), 13u);
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, SampleIndicesDistinctAndCovering) {
  Rng rng(3);
  for (std::size_t n = 0; n < 30; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      const auto idx = rng.sample_indices(n, k);
      ASSERT_EQ(idx.size(), k);
      const std::set<std::size_t> unique(idx.begin(), idx.end());
      EXPECT_EQ(unique.size(), k);
      for (std::size_t i : idx) EXPECT_LT(i, n);
    }
  }
}

TEST(Rng, SampleIndicesRoughlyUniform) {
  Rng rng(5);
  std::vector<int> hits(10, 0);
  for (int t = 0; t < 20000; ++t) {
    for (std::size_t i : rng.sample_indices(10, 3)) ++hits[i];
  }
  // Each index expected 6000 times; sd about 65.
  for (int h : hits) EXPECT_NEAR(h, 6000, 400);
}

}  // namespace
}  // namespace instreplay
