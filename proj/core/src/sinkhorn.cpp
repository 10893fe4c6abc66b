// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "instreplay/error.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::transport {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kHuge = 1e300;

bool in_range(double x) { return std::isfinite(x) && x >= kTiny && x <= kHuge; }

struct Problem {
  std::vector<double> a;
  std::vector<double> b;
  Matrix cost;
  std::vector<std::size_t> rows;  // original indices of kept rows
  std::vector<std::size_t> cols;
};

Problem reduce(std::span<const double> mu_a, std::span<const double> mu_b, const Matrix& cost) {
  Problem p;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    if (mu_a[i] > 0.0) {
      p.rows.push_back(i);
      p.a.push_back(mu_a[i]);
    }
  }
  for (std::size_t j = 0; j < mu_b.size(); ++j) {
    if (mu_b[j] > 0.0) {
      p.cols.push_back(j);
      p.b.push_back(mu_b[j]);
    }
  }
  p.cost = Matrix(p.rows.size(), p.cols.size());
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    for (std::size_t c = 0; c < p.cols.size(); ++c) p.cost(r, c) = cost(p.rows[r], p.cols[c]);
  }
  return p;
}

// Plain scaling iterations. nullopt when any kernel entry or scaling factor
// leaves [1e-300, 1e300]; the caller then restarts in the log domain.
std::optional<SinkhornResult> solve_scaling(const Problem& p, const SinkhornOptions& opt) {
  const std::size_t m = p.a.size();
  const std::size_t n = p.b.size();
  Matrix kernel(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      kernel(i, j) = std::exp(-p.cost(i, j) / opt.epsilon);
      if (!in_range(kernel(i, j))) return std::nullopt;
    }
  }

  std::vector<double> u(m, 1.0);
  std::vector<double> v(n, 1.0);
  std::vector<double> kv(m, 0.0);
  std::vector<double> ktu(n, 0.0);
  auto apply_k = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += kernel(i, j) * v[j];
      kv[i] = s;
    }
  };

  SinkhornResult out;
  apply_k();
  for (out.iterations = 1; out.iterations <= opt.max_iter; ++out.iterations) {
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = p.a[i] / kv[i];
      if (!in_range(u[i])) return std::nullopt;
    }
    std::fill(ktu.begin(), ktu.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) ktu[j] += kernel(i, j) * u[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = p.b[j] / ktu[j];
      if (!in_range(v[j])) return std::nullopt;
    }
    apply_k();
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) err += std::abs(u[i] * kv[i] - p.a[i]);
    out.marginal_error = err;
    if (err <= opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, opt.max_iter);

  out.plan = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.plan(i, j) = u[i] * kernel(i, j) * v[j];
      out.value += out.plan(i, j) * p.cost(i, j);
    }
  }
  return out;
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

SinkhornResult solve_log(const Problem& p, const SinkhornOptions& opt) {
  const std::size_t m = p.a.size();
  const std::size_t n = p.b.size();
  std::vector<double> log_a(m);
  std::vector<double> log_b(n);
  for (std::size_t i = 0; i < m; ++i) log_a[i] = std::log(p.a[i]);
  for (std::size_t j = 0; j < n; ++j) log_b[j] = std::log(p.b[j]);

  double cost_scale = 0.0;
  for (double c : p.cost.data()) cost_scale = std::max(cost_scale, c);

  std::vector<double> f(m, 0.0);
  std::vector<double> g(n, 0.0);
  std::vector<double> scratch(std::max(m, n));

  auto row_error = [&](double eps) {
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < n; ++j) r += std::exp((f[i] + g[j] - p.cost(i, j)) / eps);
      err += std::abs(r - p.a[i]);
    }
    return err;
  };

  auto sweep = [&](double eps) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) scratch[j] = (g[j] - p.cost(i, j)) / eps;
      f[i] = eps * (log_a[i] - log_sum_exp(std::span(scratch.data(), n)));
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) scratch[i] = (f[i] - p.cost(i, j)) / eps;
      g[j] = eps * (log_b[j] - log_sum_exp(std::span(scratch.data(), m)));
    }
    for (double x : f) {
      if (!std::isfinite(x)) fail(ErrorKind::kNumeric, "sinkhorn: non-finite dual potential");
    }
  };

  SinkhornResult out;
  out.log_domain = true;

  // Warm-start through a geometric epsilon schedule; each intermediate phase
  // only needs a rough fit.
  if (opt.epsilon_scaling) {
    for (double eps = cost_scale; eps > 2.0 * opt.epsilon; eps *= 0.5) {
      for (std::size_t k = 0; k < 1000 && out.iterations < opt.max_iter; ++k) {
        sweep(eps);
        ++out.iterations;
        if (row_error(eps) <= 1e-8) break;
      }
    }
  }

  while (out.iterations < opt.max_iter) {
    sweep(opt.epsilon);
    ++out.iterations;
    out.marginal_error = row_error(opt.epsilon);
    if (out.marginal_error <= opt.tol) {
      out.converged = true;
      break;
    }
  }

  out.plan = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.plan(i, j) = std::exp((f[i] + g[j] - p.cost(i, j)) / opt.epsilon);
      out.value += out.plan(i, j) * p.cost(i, j);
    }
  }
  if (!std::isfinite(out.value)) fail(ErrorKind::kNumeric, "sinkhorn: non-finite transport cost");
  return out;
}

}  // namespace

SinkhornResult sinkhorn_wasserstein(std::span<const double> mu_a, std::span<const double> mu_b,
                                    const Matrix& cost, const SinkhornOptions& options) {
  detail::validate_marginal(mu_a, "mu_A");
  detail::validate_marginal(mu_b, "mu_B");
  if (cost.rows() != mu_a.size() || cost.cols() != mu_b.size()) {
    fail(ErrorKind::kValidation, "cost matrix shape does not match the marginals");
  }
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    fail(ErrorKind::kValidation, "sinkhorn epsilon must be positive");
  }
  if (!(options.tol > 0.0)) fail(ErrorKind::kValidation, "sinkhorn tol must be positive");
  if (options.max_iter == 0) fail(ErrorKind::kValidation, "sinkhorn max_iter must be positive");
  for (double c : cost.data()) {
    if (!std::isfinite(c) || c < 0.0) {
      fail(ErrorKind::kValidation, "cost matrix entries must be finite and nonnegative");
    }
  }

  const Problem p = reduce(mu_a, mu_b, cost);
  std::optional<SinkhornResult> result;
  if (!options.force_log_domain) result = solve_scaling(p, options);
  if (!result) result = solve_log(p, options);

  // Reinsert dropped zero-mass rows and columns.
  Matrix full(mu_a.size(), mu_b.size(), 0.0);
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    for (std::size_t c = 0; c < p.cols.size(); ++c) full(p.rows[r], p.cols[c]) = result->plan(r, c);
  }
  result->plan = std::move(full);
  return *result;
}

}  // namespace instreplay::transport
