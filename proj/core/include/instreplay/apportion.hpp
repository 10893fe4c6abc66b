// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace instreplay {

// Largest-remainder integerization of `total` units proportional to
// `weights`: floor each share, then hand leftover units to the largest
// fractional parts, ties to the lexicographically smaller key. The result
// sums to `total` exactly. Shares are quantized to 1e-9 units before
// ranking so that rescaling all weights by a positive constant cannot
// change the result through rounding noise.
//
// All-zero weights fall back to equal shares. Negative or non-finite weights
// are a validation error, as is keys.size() != weights.size().
std::vector<std::int64_t> largest_remainder(std::span<const double> weights,
                                            std::int64_t total,
                                            std::span<const std::string> keys);

// Same rule with per-item capacities. Units allocated beyond an item's
// capacity are redistributed over the items that still have room, by the same
// rule on their original weights, until `total` is placed or every item is
// full. The result sums to min(total, sum(capacities)).
std::vector<std::int64_t> apportion_with_capacity(std::span<const double> weights,
                                                  std::int64_t total,
                                                  std::span<const std::int64_t> capacities,
                                                  std::span<const std::string> keys);

}  // namespace instreplay
