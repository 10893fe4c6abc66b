// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations. None of these call into the
// library's solvers; they recompute from definitions, slowly.

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace instreplay::testing {

using Dense = std::vector<std::vector<double>>;

// Minimum of <x, cost> over every basic feasible solution of the
// transportation polytope. Bases are spanning trees of the bipartite
// row/column graph; each is solved by leaf peeling. Exponential; keep m, n
// at or below 5.
double lp_vertex_optimum(std::span<const double> mu_a, std::span<const double> mu_b,
                         const Dense& cost);

double naive_cosine_distance(std::span<const double> u, std::span<const double> v);

// Connected components of the graph "cosine distance <= threshold"; each
// tag maps to the smallest member of its component. With min-points 2 every
// tag with a neighbour is a core point, so this equals the density
// clustering.
std::map<std::string, std::string> threshold_components(const std::vector<std::string>& tags,
                                                        const Dense& vectors, double threshold);

// Mean silhouette from the pairwise distance matrix, straight from the
// definition.
double naive_silhouette(const Dense& points, const std::vector<std::size_t>& assignment);

// Index of the nearest center by cosine distance, ties to the lowest index.
std::vector<std::size_t> nearest_center(const Dense& points, const Dense& centers);

// LCS length by memoized recursion over whitespace tokens.
std::size_t recursive_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace instreplay::testing
