// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

// The packaged benchmark_main archive holds LTO bytecode from another GCC
// release and fails to link, so each suite gets this entry point instead.
#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
