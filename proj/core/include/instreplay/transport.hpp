// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "instreplay/corpus.hpp"

namespace instreplay::transport {

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// 1 - cos(u, v), clamped to [0, 2]. Zero vectors are a domain error.
double cosine_distance(std::span<const double> u, std::span<const double> v);
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct CostMatrix {
  std::vector<std::string> row_keys;
  std::vector<std::string> col_keys;
  Matrix entries;
};

CostMatrix cost_matrix(std::span<const std::string> row_keys,
                       const corpus::EmbeddingTable& row_embeddings,
                       std::span<const std::string> col_keys,
                       const corpus::EmbeddingTable& col_embeddings);
inline CostMatrix cost_matrix(std::span<const std::string> row_keys,
                              std::span<const std::string> col_keys,
                              const corpus::EmbeddingTable& embeddings) {
  return cost_matrix(row_keys, embeddings, col_keys, embeddings);
}

struct TransportPlan {
  Matrix plan;
  double value = 0.0;
  std::size_t pivots = 0;
};

// Optimal coupling of the discrete transportation LP. Marginals must be
// nonnegative and sum to 1 within 1e-9. Zero-mass rows/columns are removed
// before solving and come back as zero rows/columns of the plan. Entering
// variables are chosen by most negative reduced cost, ties to the lowest
// (row, column), so plans are reproducible.
TransportPlan exact_wasserstein(std::span<const double> mu_a, std::span<const double> mu_b,
                                const Matrix& cost);

struct SinkhornOptions {
  double epsilon = 0.0;  // absolute regularization strength, > 0
  double tol = 1e-9;     // L1 marginal violation at convergence
  std::size_t max_iter = 10000;
  // Anneal epsilon geometrically from the cost scale down to `epsilon`
  // (log domain). Converges to the same fixed point in fewer iterations.
  bool epsilon_scaling = true;
  bool force_log_domain = false;
};

struct SinkhornResult {
  double value = 0.0;  // <plan, cost>
  bool converged = false;
  std::size_t iterations = 0;
  bool log_domain = false;
  double marginal_error = 0.0;
  Matrix plan;
};

// Entropic OT by alternating marginal scaling. Runs in the log domain when a
// kernel entry or scaling factor leaves [1e-300, 1e300].
SinkhornResult sinkhorn_wasserstein(std::span<const double> mu_a, std::span<const double> mu_b,
                                    const Matrix& cost, const SinkhornOptions& options);

// 1e-2 * mean(cost); 1e-2 when the cost is identically zero.
double default_epsilon(const Matrix& cost, double scale = 1e-2);

enum class Mode { kReal, kUniform };
enum class Method { kExact, kSinkhorn };

Mode parse_mode(std::string_view name);
Method parse_method(std::string_view name);
std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(Method method) noexcept;

struct DistanceOptions {
  Mode mode = Mode::kReal;
  Method method = Method::kExact;
  std::optional<double> epsilon;  // absolute; defaults to epsilon_scale * mean(cost)
  double epsilon_scale = 1e-2;
  double tol = 1e-9;
  std::size_t max_iter = 10000;
};

struct Distance {
  double value = 0.0;
  bool converged = true;
};

// Wasserstein distance between the instruction distributions of two tasks
// under cosine cost. Mode kReal uses the instruction histograms, kUniform puts
// 1/n on each distinct instruction. Instructions are sorted and the pair
// oriented canonically, so the result does not depend on argument order or
// on instance order.
Distance task_distance(const corpus::TaskDataset& a, const corpus::TaskDataset& b,
                       const corpus::EmbeddingTable& embeddings, const DistanceOptions& options);

namespace detail {
// Throws validation error unless `mu` is a probability vector within 1e-9.
void validate_marginal(std::span<const double> mu, std::string_view name);
}  // namespace detail

}  // namespace instreplay::transport
