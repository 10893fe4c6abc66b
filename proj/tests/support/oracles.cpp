// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace instreplay::testing {

namespace {

struct Cell {
  std::size_t r;
  std::size_t c;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x];
  return x;
}

// Flow on a spanning tree by repeatedly fixing a cell that is the only
// unresolved one in its row or column. Returns false if peeling stalls.
bool peel(const std::vector<Cell>& tree, std::span<const double> mu_a,
          std::span<const double> mu_b, std::vector<double>& flow) {
  const std::size_t m = mu_a.size();
  const std::size_t n = mu_b.size();
  std::vector<double> row_left(mu_a.begin(), mu_a.end());
  std::vector<double> col_left(mu_b.begin(), mu_b.end());
  std::vector<std::size_t> row_deg(m, 0);
  std::vector<std::size_t> col_deg(n, 0);
  for (const Cell& e : tree) {
    ++row_deg[e.r];
    ++col_deg[e.c];
  }
  std::vector<bool> done(tree.size(), false);
  flow.assign(tree.size(), 0.0);
  for (std::size_t step = 0; step < tree.size(); ++step) {
    bool progressed = false;
    for (std::size_t k = 0; k < tree.size() && !progressed; ++k) {
      if (done[k]) continue;
      const Cell& e = tree[k];
      double x;
      if (row_deg[e.r] == 1) {
        x = row_left[e.r];
      } else if (col_deg[e.c] == 1) {
        x = col_left[e.c];
      } else {
        continue;
      }
      flow[k] = x;
      row_left[e.r] -= x;
      col_left[e.c] -= x;
      --row_deg[e.r];
      --col_deg[e.c];
      done[k] = true;
      progressed = true;
    }
    if (!progressed) return false;
  }
  return true;
}

}  // namespace

double lp_vertex_optimum(std::span<const double> mu_a, std::span<const double> mu_b,
                         const Dense& cost) {
  const std::size_t m = mu_a.size();
  const std::size_t n = mu_b.size();
  const std::size_t need = m + n - 1;
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) cells.push_back({r, c});
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<Cell> tree;
  std::vector<double> flow;
  // Depth-first over acyclic cell subsets in index order; a subset of size
  // m + n - 1 without cycles is a spanning tree.
  std::function<void(std::size_t, std::vector<std::size_t>)> dfs =
      [&](std::size_t next, std::vector<std::size_t> parent) {
        if (tree.size() == need) {
          if (!peel(tree, mu_a, mu_b, flow)) return;
          double value = 0.0;
          for (std::size_t k = 0; k < tree.size(); ++k) {
            if (flow[k] < -1e-12) return;
            value += flow[k] * cost[tree[k].r][tree[k].c];
          }
          best = std::min(best, value);
          return;
        }
        for (std::size_t i = next; i < cells.size(); ++i) {
          if (cells.size() - i < need - tree.size()) return;
          const std::size_t a = find_root(parent, cells[i].r);
          const std::size_t b = find_root(parent, m + cells[i].c);
          if (a == b) continue;
          std::vector<std::size_t> merged = parent;
          merged[a] = b;
          tree.push_back(cells[i]);
          dfs(i + 1, std::move(merged));
          tree.pop_back();
        }
      };
  std::vector<std::size_t> parent(m + n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  dfs(0, parent);
  return best;
}

double naive_cosine_distance(std::span<const double> u, std::span<const double> v) {
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return std::clamp(1.0 - dot / std::sqrt(uu * vv), 0.0, 2.0);
}

std::map<std::string, std::string> threshold_components(const std::vector<std::string>& tags,
                                                        const Dense& vectors, double threshold) {
  const std::size_t n = tags.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (naive_cosine_distance(vectors[i], vectors[j]) <= threshold) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }
  std::map<std::size_t, std::string> smallest;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find_root(parent, i);
    auto [it, fresh] = smallest.emplace(root, tags[i]);
    if (!fresh && tags[i] < it->second) it->second = tags[i];
  }
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < n; ++i) out[tags[i]] = smallest[find_root(parent, i)];
  return out;
}

double naive_silhouette(const Dense& points, const std::vector<std::size_t>& assignment) {
  const std::size_t n = points.size();
  std::size_t k = 0;
  for (std::size_t c : assignment) k = std::max(k, c + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[assignment[j]] += naive_cosine_distance(points[i], points[j]);
      ++count[assignment[j]];
    }
    const std::size_t own = assignment[i];
    if (count[own] == 0) continue;
    const double a = sum[own] / static_cast<double>(count[own]);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && count[c] > 0) b = std::min(b, sum[c] / static_cast<double>(count[c]));
    }
    if (!std::isfinite(b)) continue;
    if (std::max(a, b) > 0.0) total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

std::vector<std::size_t> nearest_center(const Dense& points, const Dense& centers) {
  std::vector<std::size_t> out;
  for (const auto& p : points) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < centers.size(); ++c) {
      if (naive_cosine_distance(p, centers[c]) < naive_cosine_distance(p, centers[best])) best = c;
    }
    out.push_back(best);
  }
  return out;
}

std::size_t recursive_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size() || j == b.size()) return std::size_t{0};
    const auto key = std::make_pair(i, j);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t v = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = v;
    return v;
  };
  return go(0, 0);
}

}  // namespace instreplay::testing
