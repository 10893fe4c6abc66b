// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/apportion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "instreplay/error.hpp"

namespace instreplay {

namespace {

constexpr std::int64_t kQuantum = 1'000'000'000;  // shares kept to 1e-9 units
constexpr std::int64_t kMaxTotal = 1'000'000'000;

}  // namespace

std::vector<std::int64_t> largest_remainder(std::span<const double> weights,
                                            std::int64_t total,
                                            std::span<const std::string> keys) {
  if (weights.size() != keys.size()) {
    fail(ErrorKind::kValidation, "largest_remainder: weights/keys size mismatch");
  }
  if (total < 0 || total > kMaxTotal) {
    fail(ErrorKind::kValidation, "largest_remainder: total out of range");
  }
  const std::size_t n = weights.size();
  std::vector<std::int64_t> out(n, 0);
  if (n == 0 || total == 0) return out;

  long double sum = 0.0L;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      fail(ErrorKind::kValidation, "largest_remainder: weights must be finite and nonnegative");
    }
    sum += w;
  }

  std::vector<std::int64_t> fraction(n, 0);
  std::int64_t placed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double share =
        sum > 0.0L ? static_cast<long double>(total) * weights[i] / sum
                   : static_cast<long double>(total) / static_cast<long double>(n);
    const auto quantized = static_cast<std::int64_t>(std::llround(share * kQuantum));
    out[i] = quantized / kQuantum;
    fraction[i] = quantized % kQuantum;
    placed += out[i];
  }

  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    if (fraction[a] != fraction[b]) return fraction[a] > fraction[b];
    return keys[a] < keys[b];
  });

  std::int64_t leftover = total - placed;
  for (std::size_t r = 0; leftover > 0; r = (r + 1) % n) {
    ++out[rank[r]];
    --leftover;
  }
  // Quantization can only overshoot by rounding a share up to an integer;
  // take those units back from the lowest-ranked items.
  for (std::size_t r = n; leftover < 0;) {
    r = (r == 0 ? n : r) - 1;
    if (out[rank[r]] > 0) {
      --out[rank[r]];
      ++leftover;
    }
  }
  return out;
}

std::vector<std::int64_t> apportion_with_capacity(std::span<const double> weights,
                                                  std::int64_t total,
                                                  std::span<const std::int64_t> capacities,
                                                  std::span<const std::string> keys) {
  const std::size_t n = weights.size();
  if (capacities.size() != n || keys.size() != n) {
    fail(ErrorKind::kValidation, "apportion_with_capacity: size mismatch");
  }
  std::vector<std::int64_t> out(n, 0);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (capacities[i] < 0) fail(ErrorKind::kValidation, "negative capacity");
    if (capacities[i] > 0) active.push_back(i);
  }

  std::int64_t remaining = total;
  while (remaining > 0 && !active.empty()) {
    std::vector<double> w;
    std::vector<std::string> k;
    w.reserve(active.size());
    k.reserve(active.size());
    for (std::size_t i : active) {
      w.push_back(weights[i]);
      k.push_back(keys[i]);
    }
    const auto quota = largest_remainder(w, remaining, k);

    std::int64_t overflow = 0;
    std::vector<std::size_t> still_open;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      const std::int64_t take = std::min(quota[a], capacities[i] - out[i]);
      out[i] += take;
      overflow += quota[a] - take;
      if (out[i] < capacities[i]) still_open.push_back(i);
    }
    remaining = overflow;
    active = std::move(still_open);
  }
  return out;
}

}  // namespace instreplay
