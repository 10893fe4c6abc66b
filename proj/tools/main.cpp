// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

// instreplay: stage-wise replay curation from the command line.
//
// Exit codes: 0 success, 2 invalid input or arguments, 3 stage run out of
// order, 1 anything else.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "instreplay/corpus.hpp"
#include "instreplay/error.hpp"
#include "instreplay/eval.hpp"
#include "instreplay/json_io.hpp"
#include "instreplay/pipeline.hpp"
#include "instreplay/replay.hpp"
#include "instreplay/taginfo.hpp"

namespace fs = std::filesystem;
using namespace instreplay;

namespace {

void emit(const std::optional<fs::path>& out, const std::string& contents) {
  if (out) {
    io::write_file(*out, contents);
  } else {
    std::cout << contents;
  }
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSequencing:
      return 3;
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
    case ErrorKind::kFormat:
    case ErrorKind::kMissingEmbedding:
    case ErrorKind::kDomain:
    case ErrorKind::kLookup:
    case ErrorKind::kSplit:
      return 2;
    default:
      return 1;
  }
}

// Options shared by the config-driven subcommands.
struct StageArgs {
  fs::path config;
  std::size_t stage = 1;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;

  void add_to(CLI::App& cmd, bool with_stage = true) {
    cmd.add_option("--config", config, "Run config (JSON)")->required();
    if (with_stage) cmd.add_option("--stage", stage, "Stage index, 1-based")->required();
    cmd.add_option("--strategy", strategy,
                   "inscl|random|proto-data|proto-instruction|diverse|dynamic-random|insinfo-only");
    cmd.add_option("--seed", seed, "Root seed (overrides the config)");
  }

  pipeline::RunConfig load() const {
    pipeline::RunConfig c = pipeline::load_config(config);
    if (strategy) c.strategy = replay::parse_strategy(*strategy);
    if (seed) c.seed = *seed;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replay curation for continual instruction tuning"};
  app.require_subcommand(1);

  // ingest
  fs::path ingest_corpus;
  double ingest_fraction = 0.2;
  std::uint64_t ingest_seed = 0;
  fs::path train_out;
  fs::path holdout_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and split each task into train/holdout");
  ingest->add_option("--corpus", ingest_corpus, "Corpus JSONL")->required();
  ingest->add_option("--fraction", ingest_fraction, "Holdout fraction per task")->capture_default_str();
  ingest->add_option("--seed", ingest_seed, "Split seed")->capture_default_str();
  ingest->add_option("--train-out", train_out, "Train split JSONL")->required();
  ingest->add_option("--holdout-out", holdout_out, "Holdout split JSONL")->required();

  StageArgs dist_args;
  auto* distances = app.add_subcommand("distances", "Wasserstein distances from previous tasks to a stage's task");
  dist_args.add_to(*distances);
  distances->add_option("--out", dist_args.out, "Output JSON (default stdout)");

  StageArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Write the replay plan of one stage");
  plan_args.add_to(*plan);
  plan->add_option("--out", plan_args.out, "Output JSON (default stdout)");

  StageArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Write the augmented dataset of one stage");
  sample_args.add_to(*sample);
  sample->add_option("--out", sample_args.out, "Output JSONL (default stdout)");

  // eval
  fs::path predictions_path;
  fs::path holdout_path;
  std::optional<fs::path> eval_config;
  std::optional<fs::path> bounds_path;
  std::vector<std::string> task_order;
  std::optional<fs::path> report_out;
  std::optional<fs::path> csv_out;
  std::string method_label = "inscl";
  auto* evaluate = app.add_subcommand("eval", "Score predictions: Rouge-L, Relative Gain, forgetting rate");
  evaluate->add_option("--predictions", predictions_path, "Predictions JSONL")->required();
  evaluate->add_option("--holdout", holdout_path, "Holdout corpus JSONL")->required();
  evaluate->add_option("--config", eval_config, "Run config supplying task_order and bounds");
  evaluate->add_option("--bounds", bounds_path, "Upper bounds JSON");
  evaluate->add_option("--task-order", task_order, "Task ids in training order")->delimiter(',');
  evaluate->add_option("--out", report_out, "Report JSON (default stdout)");
  evaluate->add_option("--csv", csv_out, "Plot data CSV");
  evaluate->add_option("--method", method_label, "Method label for the CSV")->capture_default_str();

  // tags normalize
  fs::path raw_tags;
  std::optional<fs::path> tag_embeddings;
  double threshold = taginfo::kDefaultClusterThreshold;
  fs::path tags_out;
  std::optional<fs::path> map_out;
  auto* tags = app.add_subcommand("tags", "Tag utilities");
  tags->require_subcommand(1);
  auto* normalize = tags->add_subcommand("normalize", "Rule and semantic aggregation of raw tags");
  normalize->add_option("--tags", raw_tags, "Raw tag JSONL")->required();
  normalize->add_option("--tag-embeddings", tag_embeddings, "Tag embedding JSONL; enables DBSCAN merging");
  normalize->add_option("--threshold", threshold, "DBSCAN cosine-distance radius")->capture_default_str();
  normalize->add_option("--out", tags_out, "Canonical tag JSONL")->required();
  normalize->add_option("--map-out", map_out, "Raw -> canonical map JSON");

  StageArgs run_args;
  std::optional<std::size_t> run_stage;
  bool force = false;
  auto* run = app.add_subcommand("run", "Run stages with persisted state under work_dir");
  run_args.add_to(*run, /*with_stage=*/false);
  run->add_option("--stage", run_stage, "Run only this stage (default: all, resuming)");
  run->add_flag("--force", force, "Discard state written under a different config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      const auto tasks = corpus::load_corpus(ingest_corpus);
      std::vector<corpus::TaskDataset> train;
      std::vector<corpus::TaskDataset> holdout;
      for (const corpus::TaskDataset& task : tasks) {
        auto split = corpus::split_holdout(task, ingest_fraction, ingest_seed);
        std::cerr << task.task_id() << ": " << split.train.size() << " train, "
                  << split.holdout.size() << " holdout\n";
        train.push_back(std::move(split.train));
        holdout.push_back(std::move(split.holdout));
      }
      io::write_file(train_out, corpus::serialize_corpus(train));
      io::write_file(holdout_out, corpus::serialize_corpus(holdout));
    } else if (*distances || *plan || *sample) {
      StageArgs& args = *distances ? dist_args : (*plan ? plan_args : sample_args);
      const pipeline::Pipeline p(args.load());
      const auto data = p.build(args.stage, p.pool_before(args.stage));
      warn_all(data.plan.warnings);
      if (*distances) {
        emit(args.out, io::dump(pipeline::distances_json(data.plan)));
      } else if (*plan) {
        emit(args.out, io::dump(data.plan.to_json()));
      } else {
        emit(args.out, replay::serialize_augmented(data.rows));
      }
    } else if (*evaluate) {
      if (eval_config) {
        const pipeline::RunConfig c = pipeline::load_config(*eval_config);
        if (task_order.empty()) task_order = c.task_order;
        if (!bounds_path) bounds_path = c.bounds;
      }
      if (task_order.empty()) fail(ErrorKind::kValidation, "eval needs --task-order or --config");
      if (!bounds_path) fail(ErrorKind::kValidation, "eval needs --bounds or a config with bounds");
      const auto holdout = corpus::load_corpus(holdout_path);
      const auto predictions = eval::load_predictions(predictions_path);
      const auto report =
          eval::evaluate_run(predictions, holdout, task_order, eval::load_bounds(*bounds_path));
      warn_all(report.warnings);
      emit(report_out, io::dump(report.to_json()));
      if (csv_out) io::write_file(*csv_out, report.plot_csv(method_label));
    } else if (*normalize) {
      const corpus::TagTable raw = corpus::load_tags(raw_tags);
      std::optional<corpus::EmbeddingTable> emb;
      if (tag_embeddings) emb = corpus::load_embeddings(*tag_embeddings);
      const auto canon = taginfo::TagCanonicalizer::build(raw, emb ? &*emb : nullptr, threshold);
      io::write_file(tags_out, corpus::serialize_tags(canon.apply(raw)));
      if (map_out) {
        io::Json map = io::Json::object();
        std::map<std::string, std::string> sorted;
        for (const auto& [instruction, list] : raw) {
          for (const std::string& tag : list) {
            std::string c = canon.canonical(tag);
            if (!c.empty()) sorted.emplace(tag, std::move(c));
          }
        }
        for (auto& [tag, c] : sorted) map[tag] = c;
        io::write_file(*map_out, io::dump(map));
      }
    } else if (*run) {
      pipeline::Pipeline p(run_args.load());
      io::Json summary = io::Json::array();
      const auto record = [&](const pipeline::StageReport& r) {
        summary.push_back({{"stage", r.stage},
                           {"task_id", r.task_id},
                           {"current_rows", r.current_rows},
                           {"replay_rows", r.replay_rows},
                           {"skipped", r.skipped}});
      };
      if (run_stage) {
        record(p.run_stage(*run_stage, force));
      } else {
        for (const auto& r : p.run_all(force).stages) record(r);
      }
      std::cout << io::dump(summary);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
