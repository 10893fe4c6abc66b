// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace instreplay::baselines {

using PointSet = std::vector<std::span<const double>>;

// Spherical k-means: cosine distance for assignment, normalized member sum as
// the center. k-means++ seeding with D^2 weights.
struct ClusterModel {
  std::size_t k = 0;
  std::vector<std::vector<double>> centers;  // unit length
  std::vector<std::size_t> assignment;       // one cluster index per point
  // Sum of point-to-center cosine distances after each assignment step.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
};

struct KMeansOptions {
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

// k is clamped to the number of points. Assignment ties go to the lowest
// cluster index; the returned assignment is nearest-center for the returned
// centers.
ClusterModel kmeans_cosine(const PointSet& points, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& options = {});

// Mean silhouette under cosine distance. Points in singleton clusters score 0.
double silhouette_cosine(const PointSet& points, std::span<const std::size_t> assignment,
                         std::size_t k);

}  // namespace instreplay::baselines
