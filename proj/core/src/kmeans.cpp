// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "instreplay/error.hpp"
#include "instreplay/rng.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::baselines {

namespace {

std::vector<double> unit(std::span<const double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) fail(ErrorKind::kDomain, "k-means: zero vector");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

double assign(const PointSet& points, const std::vector<std::vector<double>>& centers,
              std::vector<std::size_t>& assignment) {
  double objective = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = transport::cosine_distance(points[i], centers[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[i] = best;
    objective += best_d;
  }
  return objective;
}

std::vector<std::vector<double>> seed_plus_plus(const PointSet& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centers;
  centers.push_back(unit(points[rng.below(n)]));
  std::vector<double> d2(n, 0.0);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, transport::cosine_distance(points[i], c));
      d2[i] = best * best;
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));  // all points coincide with centers
    }
    centers.push_back(unit(points[pick]));
  }
  return centers;
}

}  // namespace

ClusterModel kmeans_cosine(const PointSet& points, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& options) {
  if (points.empty()) fail(ErrorKind::kValidation, "k-means needs at least one point");
  if (k == 0) fail(ErrorKind::kValidation, "k-means needs k >= 1");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) fail(ErrorKind::kValidation, "k-means points differ in dimension");
  }
  k = std::min(k, points.size());

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.centers = seed_plus_plus(points, k, rng);
  model.assignment.assign(points.size(), 0);

  std::vector<std::size_t> previous;
  for (model.iterations = 1; model.iterations <= options.max_iter; ++model.iterations) {
    const double objective = assign(points, model.centers, model.assignment);
    const bool unchanged = model.assignment == previous;
    const bool stalled = !model.objective_history.empty() &&
                         model.objective_history.back() - objective <= options.tol;
    model.objective_history.push_back(objective);
    if (unchanged || stalled) break;
    previous = model.assignment;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::vector<double> u = unit(points[i]);
      auto& s = sums[model.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += u[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      double norm = 0.0;
      for (double x : sums[c]) norm += x * x;
      // Empty or perfectly cancelling clusters keep their previous center.
      if (norm > 0.0) model.centers[c] = unit(sums[c]);
    }
  }
  model.iterations = std::min(model.iterations, options.max_iter);
  // Final assignment against the final centers.
  const double final_objective = assign(points, model.centers, model.assignment);
  if (final_objective != model.objective_history.back()) {
    model.objective_history.push_back(final_objective);
  }
  return model;
}

double silhouette_cosine(const PointSet& points, std::span<const std::size_t> assignment,
                         std::size_t k) {
  const std::size_t n = points.size();
  if (assignment.size() != n) fail(ErrorKind::kValidation, "silhouette: assignment size mismatch");
  if (n == 0) return 0.0;
  std::vector<std::size_t> size(k, 0);
  for (std::size_t c : assignment) {
    if (c >= k) fail(ErrorKind::kValidation, "silhouette: cluster index out of range");
    ++size[c];
  }

  double total = 0.0;
  std::vector<double> sum(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum[assignment[j]] += transport::cosine_distance(points[i], points[j]);
    }
    const std::size_t own = assignment[i];
    if (size[own] <= 1) continue;  // s(i) = 0
    const double a = sum[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && size[c] > 0) b = std::min(b, sum[c] / static_cast<double>(size[c]));
    }
    if (!std::isfinite(b)) continue;  // only one non-empty cluster
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

}  // namespace instreplay::baselines
