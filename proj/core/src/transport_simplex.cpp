// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

// Transportation simplex (MODI / u-v method) on the bipartite spanning-tree
// basis. Sizes here are at most a few hundred distinct instructions per task,
// so dense pricing is fine.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>

#include "instreplay/error.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::transport {

namespace {

struct Cell {
  std::size_t row;
  std::size_t col;
};

class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand, Matrix cost)
      : m_(supply.size()),
        n_(demand.size()),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        cost_(std::move(cost)),
        flow_(m_, n_, 0.0),
        basic_(m_ * n_, false) {
    double scale = 1.0;
    for (double c : cost_.data()) scale = std::max(scale, std::abs(c));
    tolerance_ = 1e-12 * scale;
  }

  std::size_t solve() {
    northwest_corner();
    const std::size_t max_pivots = 50 * m_ * n_ + 1000;
    const std::size_t degenerate_limit = 50 * (m_ + n_);
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::size_t pivots = 0;
    while (true) {
      compute_potentials();
      const auto entering = bland ? first_negative() : most_negative();
      if (!entering) return pivots;
      if (++pivots > max_pivots) {
        fail(ErrorKind::kNumeric, "transportation simplex did not terminate");
      }
      const bool degenerate = pivot(*entering);
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      // Fall back to Bland's rule if degenerate pivots stall.
      if (degenerate_run > degenerate_limit) bland = true;
    }
  }

  const Matrix& flow() const { return flow_; }

 private:
  bool is_basic(std::size_t r, std::size_t c) const { return basic_[r * n_ + c]; }

  void northwest_corner() {
    std::vector<double> rs = supply_;
    std::vector<double> cs = demand_;
    std::size_t r = 0;
    std::size_t c = 0;
    while (true) {
      const double x = std::min(rs[r], cs[c]);
      flow_(r, c) = x;
      basic_[r * n_ + c] = true;
      basis_.push_back({r, c});
      rs[r] -= x;
      cs[c] -= x;
      if (r + 1 == m_ && c + 1 == n_) break;
      // Exactly one index advances per step, which keeps m + n - 1 basic
      // cells (degenerate zeros included) forming a spanning tree.
      if (c + 1 == n_ || (r + 1 < m_ && rs[r] <= cs[c])) {
        ++r;
      } else {
        ++c;
      }
    }
  }

  // Tree adjacency over nodes 0..m-1 (rows) and m..m+n-1 (columns).
  void build_adjacency() {
    adjacency_.assign(m_ + n_, {});
    for (std::size_t e = 0; e < basis_.size(); ++e) {
      adjacency_[basis_[e].row].push_back(e);
      adjacency_[m_ + basis_[e].col].push_back(e);
    }
  }

  std::size_t other_end(std::size_t edge, std::size_t node) const {
    const Cell& cell = basis_[edge];
    return node < m_ ? m_ + cell.col : cell.row;
  }

  void compute_potentials() {
    build_adjacency();
    constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
    u_.assign(m_, kUnset);
    v_.assign(n_, kUnset);
    u_[0] = 0.0;
    std::vector<std::size_t> stack{0};
    std::vector<bool> seen(m_ + n_, false);
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t e : adjacency_[node]) {
        const std::size_t next = other_end(e, node);
        if (seen[next]) continue;
        seen[next] = true;
        const Cell& cell = basis_[e];
        if (next < m_) {
          u_[cell.row] = cost_(cell.row, cell.col) - v_[cell.col];
        } else {
          v_[cell.col] = cost_(cell.row, cell.col) - u_[cell.row];
        }
        stack.push_back(next);
      }
    }
  }

  double reduced_cost(std::size_t r, std::size_t c) const { return cost_(r, c) - u_[r] - v_[c]; }

  std::optional<Cell> most_negative() const {
    std::optional<Cell> best;
    double best_value = -tolerance_;
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (is_basic(r, c)) continue;
        const double d = reduced_cost(r, c);
        if (d < best_value) {
          best_value = d;
          best = Cell{r, c};
        }
      }
    }
    return best;
  }

  std::optional<Cell> first_negative() const {
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (!is_basic(r, c) && reduced_cost(r, c) < -tolerance_) return Cell{r, c};
      }
    }
    return std::nullopt;
  }

  // Returns true when the pivot moved zero mass.
  bool pivot(Cell entering) {
    // Tree path from column node back to the entering row closes the cycle.
    const std::size_t start = entering.row;
    const std::size_t target = m_ + entering.col;
    std::vector<std::size_t> parent_edge(m_ + n_, std::numeric_limits<std::size_t>::max());
    std::vector<bool> seen(m_ + n_, false);
    std::vector<std::size_t> queue{start};
    seen[start] = true;
    for (std::size_t head = 0; head < queue.size() && !seen[target]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t e : adjacency_[node]) {
        const std::size_t next = other_end(e, node);
        if (seen[next]) continue;
        seen[next] = true;
        parent_edge[next] = e;
        queue.push_back(next);
      }
    }
    if (!seen[target]) fail(ErrorKind::kNumeric, "transportation basis is not a spanning tree");

    // Walking target -> start, edges alternate minus, plus, ..., minus.
    std::vector<std::size_t> cycle;
    for (std::size_t node = target; node != start;) {
      const std::size_t e = parent_edge[node];
      cycle.push_back(e);
      node = other_end(e, node);
    }

    std::size_t leaving = cycle[0];
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      const Cell& cand = basis_[cycle[k]];
      const Cell& best = basis_[leaving];
      const double fc = flow_(cand.row, cand.col);
      const double fb = flow_(best.row, best.col);
      if (fc < fb || (fc == fb && std::tie(cand.row, cand.col) < std::tie(best.row, best.col))) {
        leaving = cycle[k];
      }
    }
    const Cell out = basis_[leaving];
    const double theta = flow_(out.row, out.col);

    flow_(entering.row, entering.col) += theta;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const Cell& cell = basis_[cycle[k]];
      if (k % 2 == 0) {
        flow_(cell.row, cell.col) -= theta;
      } else {
        flow_(cell.row, cell.col) += theta;
      }
    }
    flow_(out.row, out.col) = 0.0;
    basic_[out.row * n_ + out.col] = false;
    basic_[entering.row * n_ + entering.col] = true;
    basis_[leaving] = entering;
    return theta == 0.0;
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  Matrix cost_;
  Matrix flow_;
  std::vector<bool> basic_;
  std::vector<Cell> basis_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> u_;
  std::vector<double> v_;
  double tolerance_ = 1e-12;
};

}  // namespace

TransportPlan exact_wasserstein(std::span<const double> mu_a, std::span<const double> mu_b,
                                const Matrix& cost) {
  detail::validate_marginal(mu_a, "mu_A");
  detail::validate_marginal(mu_b, "mu_B");
  if (cost.rows() != mu_a.size() || cost.cols() != mu_b.size()) {
    fail(ErrorKind::kValidation, "cost matrix is " + std::to_string(cost.rows()) + "x" +
                                     std::to_string(cost.cols()) + ", marginals are " +
                                     std::to_string(mu_a.size()) + " and " +
                                     std::to_string(mu_b.size()));
  }
  for (double c : cost.data()) {
    if (!std::isfinite(c) || c < 0.0) {
      fail(ErrorKind::kValidation, "cost matrix entries must be finite and nonnegative");
    }
  }

  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    if (mu_a[i] > 0.0) rows.push_back(i);
  }
  for (std::size_t j = 0; j < mu_b.size(); ++j) {
    if (mu_b[j] > 0.0) cols.push_back(j);
  }

  std::vector<double> supply;
  std::vector<double> demand;
  double supply_total = 0.0;
  double demand_total = 0.0;
  for (std::size_t i : rows) {
    supply.push_back(mu_a[i]);
    supply_total += mu_a[i];
  }
  for (std::size_t j : cols) {
    demand.push_back(mu_b[j]);
    demand_total += mu_b[j];
  }
  // Balance: marginals may each be off from 1 by up to 1e-9.
  if (supply_total != demand_total) {
    const double s = supply_total / demand_total;
    for (double& d : demand) d *= s;
  }

  Matrix reduced(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) reduced(r, c) = cost(rows[r], cols[c]);
  }

  TransportSimplex solver(std::move(supply), std::move(demand), std::move(reduced));
  TransportPlan out;
  out.pivots = solver.solve();
  out.plan = Matrix(mu_a.size(), mu_b.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out.plan(rows[r], cols[c]) = solver.flow()(r, c);
  }
  double value = 0.0;
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    for (std::size_t c = 0; c < cost.cols(); ++c) value += out.plan(r, c) * cost(r, c);
  }
  out.value = value;
  return out;
}

}  // namespace instreplay::transport
