// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "instreplay/error.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::transport {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    fail(ErrorKind::kValidation, "cosine: vectors have different lengths (" +
                                     std::to_string(u.size()) + " vs " + std::to_string(v.size()) +
                                     ")");
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) fail(ErrorKind::kDomain, "cosine: zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return std::clamp(1.0 - cosine_similarity(u, v), 0.0, 2.0);
}

CostMatrix cost_matrix(std::span<const std::string> row_keys,
                       const corpus::EmbeddingTable& row_embeddings,
                       std::span<const std::string> col_keys,
                       const corpus::EmbeddingTable& col_embeddings) {
  CostMatrix out;
  out.row_keys.assign(row_keys.begin(), row_keys.end());
  out.col_keys.assign(col_keys.begin(), col_keys.end());
  out.entries = Matrix(row_keys.size(), col_keys.size());
  std::vector<std::span<const double>> cols;
  cols.reserve(col_keys.size());
  for (const std::string& key : col_keys) cols.push_back(col_embeddings.at(key));
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    const auto row = row_embeddings.at(row_keys[r]);
    for (std::size_t c = 0; c < cols.size(); ++c) out.entries(r, c) = cosine_distance(row, cols[c]);
  }
  return out;
}

double default_epsilon(const Matrix& cost, double scale) {
  double sum = 0.0;
  for (double c : cost.data()) sum += c;
  const double mean = cost.data().empty() ? 0.0 : sum / static_cast<double>(cost.data().size());
  return mean > 0.0 ? scale * mean : scale;
}

Mode parse_mode(std::string_view name) {
  if (name == "real") return Mode::kReal;
  if (name == "uniform") return Mode::kUniform;
  fail(ErrorKind::kValidation, "unknown transport mode \"" + std::string(name) + "\"");
}

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::kExact;
  if (name == "sinkhorn") return Method::kSinkhorn;
  fail(ErrorKind::kValidation, "unknown transport method \"" + std::string(name) + "\"");
}

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::kReal ? "real" : "uniform";
}

std::string_view to_string(Method method) noexcept {
  return method == Method::kExact ? "exact" : "sinkhorn";
}

namespace detail {

void validate_marginal(std::span<const double> mu, std::string_view name) {
  if (mu.empty()) fail(ErrorKind::kValidation, std::string(name) + " is empty");
  double sum = 0.0;
  for (double m : mu) {
    if (!std::isfinite(m) || m < 0.0) {
      fail(ErrorKind::kValidation, std::string(name) + " has a negative or non-finite mass");
    }
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorKind::kValidation, std::string(name) + " sums to " + std::to_string(sum) +
                                     ", expected 1 within 1e-9");
  }
}

}  // namespace detail

namespace {

struct Marginal {
  std::vector<std::string> keys;
  std::vector<double> mass;
};

Marginal task_marginal(const corpus::TaskDataset& task, Mode mode) {
  if (task.empty()) fail(ErrorKind::kValidation, "task " + task.task_id() + " has no instances");
  std::vector<const corpus::HistogramEntry*> entries;
  for (const auto& entry : task.histogram()) entries.push_back(&entry);
  std::sort(entries.begin(), entries.end(),
            [](const auto* x, const auto* y) { return x->instruction < y->instruction; });
  Marginal out;
  const double uniform = 1.0 / static_cast<double>(entries.size());
  for (const auto* entry : entries) {
    out.keys.push_back(entry->instruction);
    out.mass.push_back(mode == Mode::kReal ? entry->probability : uniform);
  }
  return out;
}

}  // namespace

Distance task_distance(const corpus::TaskDataset& a, const corpus::TaskDataset& b,
                       const corpus::EmbeddingTable& embeddings, const DistanceOptions& options) {
  Marginal ma = task_marginal(a, options.mode);
  Marginal mb = task_marginal(b, options.mode);
  // Canonical orientation makes d(A, B) and d(B, A) the same computation.
  if (std::tie(b.task_id(), mb.keys) < std::tie(a.task_id(), ma.keys)) std::swap(ma, mb);

  const CostMatrix cost = cost_matrix(ma.keys, mb.keys, embeddings);
  if (options.method == Method::kExact) {
    return {exact_wasserstein(ma.mass, mb.mass, cost.entries).value, true};
  }
  SinkhornOptions sk;
  sk.epsilon = options.epsilon.value_or(default_epsilon(cost.entries, options.epsilon_scale));
  sk.tol = options.tol;
  sk.max_iter = options.max_iter;
  const SinkhornResult result = sinkhorn_wasserstein(ma.mass, mb.mass, cost.entries, sk);
  return {result.value, result.converged};
}

}  // namespace instreplay::transport
