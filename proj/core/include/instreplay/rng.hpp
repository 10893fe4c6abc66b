// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace instreplay {

// Derives an independent stream seed from the run seed and a name, e.g.
// derive_seed(seed, "insinfo", task_id). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                          std::string_view name = {});

// mt19937_64 has a standardized output sequence; the distributions below are
// implemented here because the std:: ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1).
  double uniform();

  // k distinct indices drawn uniformly from [0, n) in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace instreplay
