// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "instreplay/error.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/text.hpp"

namespace instreplay::eval {

using io::Json;

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (const text::CodePoint& cp : text::decode(input)) {
    switch (cp.cls) {
      case text::CharClass::kSpace:
        flush();
        break;
      case text::CharClass::kPunct:
        flush();
        text::append_utf8(current, cp.value);
        flush();
        break;
      default:
        text::append_utf8(current, text::to_lower(cp.value));
    }
  }
  flush();
  return tokens;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  // Two-row DP table.
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = tokenize(candidate);
  const auto r = tokenize(reference);
  if (c.empty() || r.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(c, r));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(c.size());
  const double rec = lcs / static_cast<double>(r.size());
  return 2.0 * p * rec / (p + rec);
}

double relative_gain(const StageResult& result, std::span<const std::string> previous_tasks,
                     const UpperBounds& bounds) {
  if (result.stage == 0) fail(ErrorKind::kValidation, "stages are numbered from 1");
  if (result.stage == 1) return 100.0;
  if (previous_tasks.size() != result.stage - 1) {
    fail(ErrorKind::kValidation, "stage " + std::to_string(result.stage) + " needs " +
                                     std::to_string(result.stage - 1) + " previous tasks");
  }
  std::vector<std::string> tasks(previous_tasks.begin(), previous_tasks.end());
  std::sort(tasks.begin(), tasks.end());
  double sum = 0.0;
  for (const std::string& task : tasks) {
    const auto b = bounds.find(task);
    if (b == bounds.end()) fail(ErrorKind::kValidation, "no upper bound for task " + task);
    if (!(b->second > 0.0)) fail(ErrorKind::kValidation, "upper bound for task " + task + " is not positive");
    const auto s = result.scores.find(task);
    if (s == result.scores.end()) {
      fail(ErrorKind::kValidation, "no stage " + std::to_string(result.stage) + " score for task " + task);
    }
    sum += s->second / b->second;
  }
  return sum / static_cast<double>(tasks.size()) * 100.0;
}

double forgetting_rate(double initial, double final_score) {
  if (!(initial > 0.0)) fail(ErrorKind::kDomain, "forgetting rate needs a positive initial score");
  return (initial - final_score) / initial * 100.0;
}

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
  std::vector<Prediction> out;
  io::for_each_jsonl(jsonl, [&](const Json& record, std::size_t line) {
    Prediction p;
    const auto stage = record.find("stage");
    if (stage == record.end() || !stage->is_number_unsigned() || stage->get<std::size_t>() == 0) {
      throw ParseError(line, "field \"stage\" must be a positive integer");
    }
    p.stage = stage->get<std::size_t>();
    p.task_id = io::get_string(record, "task_id", line);
    p.id = io::get_string(record, "id", line);
    p.output = io::get_string(record, "output", line);
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(io::read_file(path));
}

UpperBounds parse_bounds(const Json& doc) {
  if (!doc.is_object()) fail(ErrorKind::kFormat, "bounds must be a JSON object");
  UpperBounds out;
  for (const auto& [task, value] : doc.items()) {
    if (!value.is_number()) fail(ErrorKind::kFormat, "bound for task " + task + " is not a number");
    const double v = value.get<double>();
    if (!(v > 0.0 && v <= 1.0)) {
      fail(ErrorKind::kValidation, "bound for task " + task + " must lie in (0, 1]");
    }
    out.emplace(task, v);
  }
  return out;
}

UpperBounds load_bounds(const std::filesystem::path& path) { return parse_bounds(io::read_json(path)); }

RunReport evaluate_run(std::span<const Prediction> predictions,
                       std::span<const corpus::TaskDataset> holdout,
                       std::span<const std::string> task_order, const UpperBounds& bounds) {
  RunReport report;
  report.task_order.assign(task_order.begin(), task_order.end());
  const std::size_t stages = task_order.size();
  if (stages == 0) fail(ErrorKind::kValidation, "task order is empty");

  std::vector<const corpus::TaskDataset*> tasks;
  for (const std::string& id : task_order) tasks.push_back(&corpus::find_task(holdout, id));

  using Key = std::tuple<std::size_t, std::string_view, std::string_view>;
  std::map<Key, const Prediction*> index;
  for (const Prediction& p : predictions) {
    if (!index.emplace(Key{p.stage, p.task_id, p.id}, &p).second) {
      fail(ErrorKind::kValidation, "duplicate prediction for stage " + std::to_string(p.stage) +
                                       ", task " + p.task_id + ", id " + p.id);
    }
  }

  std::size_t matched = 0;
  for (std::size_t i = 1; i <= stages; ++i) {
    StageResult result{i, {}};
    for (std::size_t j = 0; j < i; ++j) {
      const corpus::TaskDataset& task = *tasks[j];
      double sum = 0.0;
      std::size_t task_missing = 0;
      for (const corpus::Instance& inst : task.instances()) {
        ++report.expected;
        const auto it = index.find(Key{i, task.task_id(), inst.id});
        if (it == index.end()) {
          ++task_missing;
          continue;
        }
        ++matched;
        sum += rouge_l(it->second->output, inst.output);
      }
      report.scored += task.size() - task_missing;
      report.missing += task_missing;
      if (task_missing > 0) {
        report.warnings.push_back("stage " + std::to_string(i) + ", task " + task.task_id() + ": " +
                                  std::to_string(task_missing) + " of " +
                                  std::to_string(task.size()) + " predictions missing, scored 0");
      }
      result.scores[task.task_id()] = task.empty() ? 0.0 : sum / static_cast<double>(task.size());
    }
    report.relative_gain.push_back(
        relative_gain(result, std::span<const std::string>(task_order.data(), i - 1), bounds));
    report.stages.push_back(std::move(result));
  }
  report.unmatched = predictions.size() - matched;
  if (report.unmatched > 0) {
    report.warnings.push_back(std::to_string(report.unmatched) +
                              " predictions name no holdout instance of their stage");
  }

  for (std::size_t j = 0; j + 1 < stages; ++j) {
    const std::string& task = task_order[j];
    const double initial = report.stages[j].scores.at(task);
    const double last = report.stages.back().scores.at(task);
    if (initial > 0.0) {
      report.forgetting.emplace_back(task, forgetting_rate(initial, last));
    } else {
      report.forgetting.emplace_back(task, std::nullopt);
      report.warnings.push_back("forgetting rate undefined for task " + task + ": initial score 0");
    }
  }

  double sum = 0.0;
  for (double g : report.relative_gain) sum += g;
  report.average = sum / static_cast<double>(stages);
  double sq = 0.0;
  for (double g : report.relative_gain) sq += (g - report.average) * (g - report.average);
  report.variance = sq / static_cast<double>(stages);
  report.std_dev = std::sqrt(report.variance);
  return report;
}

Json RunReport::to_json() const {
  Json doc;
  doc["metric"] = kRougeVariant;
  doc["task_order"] = task_order;
  Json stage_list = Json::array();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    Json s;
    s["stage"] = stages[i].stage;
    Json scores = Json::object();
    // Task order rather than map order, matching how the stage was built.
    for (std::size_t j = 0; j < stages[i].stage; ++j) {
      scores[task_order[j]] = stages[i].scores.at(task_order[j]);
    }
    s["scores"] = std::move(scores);
    s["relative_gain"] = relative_gain[i];
    stage_list.push_back(std::move(s));
  }
  doc["stages"] = std::move(stage_list);
  doc["relative_gain"] = relative_gain;
  Json fg = Json::object();
  for (const auto& [task, value] : forgetting) fg[task] = value ? Json(*value) : Json(nullptr);
  doc["forgetting_rate"] = std::move(fg);
  doc["summary"] = {{"average", average}, {"std", std_dev}, {"variance", variance}};
  doc["coverage"] = {{"expected", expected},
                     {"scored", scored},
                     {"missing", missing},
                     {"unmatched", unmatched}};
  doc["warnings"] = warnings;
  return doc;
}

std::string RunReport::plot_csv(std::string_view method) const {
  std::ostringstream out;
  out.precision(17);
  out << "stage,method,relative_gain\n";
  for (std::size_t i = 0; i < relative_gain.size(); ++i) {
    out << stages[i].stage << ',' << method << ',' << relative_gain[i] << '\n';
  }
  return out.str();
}

}  // namespace instreplay::eval
