// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "expect_error.hpp"
#include "generators.hpp"
#include "instreplay/kmeans.hpp"
#include "oracles.hpp"

namespace instreplay::baselines {
namespace {

using testing::Dense;
using testing::error_of;

PointSet view(const Dense& d) { return PointSet(d.begin(), d.end()); }

Dense groups(Rng& rng, std::size_t g, std::size_t per, std::size_t dim, double spread) {
  const Dense centers = testing::random_vectors(rng, g, dim);
  Dense out;
  for (std::size_t i = 0; i < g * per; ++i) out.push_back(testing::jitter(rng, centers[i % g], spread));
  return out;
}

TEST(KMeans, PropertyFinalAssignmentIsNearestCenter) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Dense pts = testing::random_vectors(rng, 2 + rng.below(40), 2 + rng.below(5));
    const std::size_t k = 1 + rng.below(6);
    const auto model = kmeans_cosine(view(pts), k, rng.next());
    EXPECT_EQ(model.k, std::min(k, pts.size()));
    EXPECT_EQ(model.assignment, testing::nearest_center(pts, model.centers));
    for (std::size_t i = 1; i < model.objective_history.size(); ++i) {
      EXPECT_LE(model.objective_history[i], model.objective_history[i - 1] + 1e-12);
    }
    EXPECT_LE(model.iterations, 100u);
  }
}

TEST(KMeans, RecoversSeparableGroups) {
  Rng rng(2);
  const Dense pts = groups(rng, 2, 10, 5, 0.02);
  const auto model = kmeans_cosine(view(pts), 2, 3);
  for (std::size_t i = 2; i < pts.size(); ++i) EXPECT_EQ(model.assignment[i], model.assignment[i % 2]);
  EXPECT_NE(model.assignment[0], model.assignment[1]);
}

TEST(KMeans, SeededAndClamped) {
  Rng rng(3);
  const Dense pts = testing::random_vectors(rng, 12, 4);
  const auto a = kmeans_cosine(view(pts), 3, 77);
  const auto b = kmeans_cosine(view(pts), 3, 77);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(kmeans_cosine(view(pts), 50, 1).k, 12u);
}

TEST(KMeans, Errors) {
  EXPECT_EQ(error_of([] { kmeans_cosine(PointSet{}, 2, 1); }), "validation");
  const Dense pts = {{1, 0}};
  EXPECT_EQ(error_of([&] { kmeans_cosine(view(pts), 0, 1); }), "validation");
  const Dense ragged = {{1, 0}, {1, 0, 0}};
  EXPECT_EQ(error_of([&] { kmeans_cosine(view(ragged), 1, 1); }), "validation");
}

TEST(Silhouette, PropertyMatchesDefinition) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Dense pts = testing::random_vectors(rng, 3 + rng.below(20), 3);
    const std::size_t k = 2 + rng.below(3);
    std::vector<std::size_t> assignment(pts.size());
    for (auto& a : assignment) a = rng.below(k);
    const double s = silhouette_cosine(view(pts), assignment, k);
    EXPECT_NEAR(s, testing::naive_silhouette(pts, assignment), 1e-12);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Silhouette, TrueKWinsOnSeparatedGroups) {
  Rng rng(5);
  const Dense pts = groups(rng, 4, 6, 6, 0.03);
  double best = -2.0;
  std::size_t best_k = 0;
  for (std::size_t k = 2; k <= 8; ++k) {
    const auto m = kmeans_cosine(view(pts), k, derive_seed(5, "k", std::to_string(k)));
    const double s = silhouette_cosine(view(pts), m.assignment, k);
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  EXPECT_EQ(best_k, 4u);
  EXPECT_GT(best, 0.8);
}

}  // namespace
}  // namespace instreplay::baselines
