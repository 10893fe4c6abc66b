// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "instreplay/corpus.hpp"

namespace instreplay::eval {

// Lowercase, split every punctuation code point into its own token, then
// split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// Sentence-level Rouge-L F1 (beta = 1) over tokenize(). Zero when either side
// has no tokens.
double rouge_l(std::string_view candidate, std::string_view reference);

inline constexpr std::string_view kRougeVariant =
    "rouge-l sentence-level F1 (beta=1); tokens: lowercase, punctuation split, whitespace";

using Scores = std::map<std::string, double, std::less<>>;
using UpperBounds = Scores;

// R_j^i for every task j <= i.
struct StageResult {
  std::size_t stage = 1;
  Scores scores;
};

// Mean over `previous_tasks` (the tasks before stage i) of score / bound, in
// percent; 100 at stage 1. Missing or non-positive bounds and missing scores
// are validation errors. Ratios are summed in task-id order so the result
// does not depend on the order of `previous_tasks`.
double relative_gain(const StageResult& result, std::span<const std::string> previous_tasks,
                     const UpperBounds& bounds);

// (R* - R_last) / R* in percent; negative values mean backward transfer.
// Domain error unless R* > 0.
double forgetting_rate(double initial, double final_score);

struct Prediction {
  std::size_t stage = 0;
  std::string task_id;
  std::string id;
  std::string output;
};

// JSON Lines {stage, task_id, id, output}.
std::vector<Prediction> parse_predictions(std::string_view jsonl);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

UpperBounds load_bounds(const std::filesystem::path& path);
UpperBounds parse_bounds(const nlohmann::ordered_json& doc);

struct RunReport {
  std::vector<std::string> task_order;
  std::vector<StageResult> stages;    // one per task in task_order
  std::vector<double> relative_gain;  // per stage
  // Tasks 1..S-1; empty optional when R* is zero.
  std::vector<std::pair<std::string, std::optional<double>>> forgetting;
  double average = 0.0;   // mean Relative Gain over all stages
  double std_dev = 0.0;   // population standard deviation of the same
  double variance = 0.0;
  std::size_t expected = 0;  // (stage, holdout instance) pairs to score
  std::size_t scored = 0;
  std::size_t missing = 0;
  std::size_t unmatched = 0;  // predictions naming no holdout instance
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
  // "stage,method,relative_gain" rows.
  std::string plot_csv(std::string_view method) const;
};

// Stage i scores tasks task_order[0..i-1] on their holdout sets. Missing
// predictions score 0 and are counted in the coverage warning.
RunReport evaluate_run(std::span<const Prediction> predictions,
                       std::span<const corpus::TaskDataset> holdout,
                       std::span<const std::string> task_order, const UpperBounds& bounds);

}  // namespace instreplay::eval
