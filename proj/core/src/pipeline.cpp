// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include "instreplay/pipeline.hpp"

#include <algorithm>
#include <set>

#include <openssl/evp.h>

#include "instreplay/error.hpp"
#include "instreplay/json_io.hpp"

namespace instreplay::pipeline {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr std::string_view kConfigKeys[] = {
    "task_order", "alpha_per_task", "strategy",       "mode",
    "method",     "seed",           "epsilon",        "epsilon_scale",
    "tol",        "max_iter",       "cluster_threshold", "corpus",
    "embeddings", "tags",           "tag_embeddings", "instance_embeddings",
    "bounds",     "work_dir",
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    fail(ErrorKind::kValidation, std::string(what) + " not found: " + path.string());
  }
}

std::string pool_name(std::size_t stage) {
  return "pool_stage_" + std::to_string(stage) + ".json";
}

std::string stage_dir(std::size_t stage) { return "stage_" + std::to_string(stage); }

struct State {
  std::string config_hash;
  std::vector<std::string> task_order;
  std::set<std::size_t> completed;

  Json to_json() const {
    Json doc;
    doc["config_hash"] = config_hash;
    doc["task_order"] = task_order;
    doc["completed"] = Json(std::vector<std::size_t>(completed.begin(), completed.end()));
    return doc;
  }
};

std::optional<State> read_state(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  const Json doc = io::read_json(path);
  State s;
  try {
    s.config_hash = doc.at("config_hash").get<std::string>();
    s.task_order = doc.at("task_order").get<std::vector<std::string>>();
    for (const auto& c : doc.at("completed")) s.completed.insert(c.get<std::size_t>());
  } catch (const Json::exception& e) {
    fail(ErrorKind::kFormat, "malformed stage state " + path.string() + ": " + e.what());
  }
  return s;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

RunConfig RunConfig::from_json(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) fail(ErrorKind::kValidation, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys)) {
      fail(ErrorKind::kValidation, "unknown config key \"" + key + "\"");
    }
  }
  RunConfig c;
  try {
    c.task_order = doc.at("task_order").get<std::vector<std::string>>();
    c.alpha_per_task = doc.value("alpha_per_task", std::int64_t{200});
    c.strategy = replay::parse_strategy(doc.value("strategy", std::string("inscl")));
    c.distance.mode = transport::parse_mode(doc.value("mode", std::string("real")));
    c.distance.method = transport::parse_method(doc.value("method", std::string("exact")));
    c.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("epsilon") && !doc.at("epsilon").is_null()) {
      c.distance.epsilon = doc.at("epsilon").get<double>();
    }
    c.distance.epsilon_scale = doc.value("epsilon_scale", 1e-2);
    c.distance.tol = doc.value("tol", 1e-9);
    c.distance.max_iter = doc.value("max_iter", std::size_t{10000});
    c.cluster_threshold = doc.value("cluster_threshold", taginfo::kDefaultClusterThreshold);
    c.corpus = resolve(base_dir, doc.at("corpus").get<std::string>());
    c.embeddings = resolve(base_dir, doc.at("embeddings").get<std::string>());
    c.tags = resolve(base_dir, doc.at("tags").get<std::string>());
    if (doc.contains("tag_embeddings")) {
      c.tag_embeddings = resolve(base_dir, doc.at("tag_embeddings").get<std::string>());
    }
    if (doc.contains("instance_embeddings")) {
      c.instance_embeddings = resolve(base_dir, doc.at("instance_embeddings").get<std::string>());
    }
    if (doc.contains("bounds")) c.bounds = resolve(base_dir, doc.at("bounds").get<std::string>());
    c.work_dir = resolve(base_dir, doc.value("work_dir", std::string("work")));
  } catch (const Json::exception& e) {
    fail(ErrorKind::kValidation, std::string("invalid config: ") + e.what());
  }

  std::set<std::string> seen;
  for (const std::string& t : c.task_order) {
    if (!seen.insert(t).second) fail(ErrorKind::kValidation, "task_order repeats task " + t);
  }
  if (c.task_order.empty()) fail(ErrorKind::kValidation, "task_order is empty");
  if (c.alpha_per_task <= 0) fail(ErrorKind::kValidation, "alpha_per_task must be positive");
  if (!(c.cluster_threshold > 0.0 && c.cluster_threshold < 1.0)) {
    fail(ErrorKind::kValidation, "cluster_threshold must lie in (0, 1)");
  }
  return c;
}

Json RunConfig::settings_json() const {
  Json doc;
  doc["task_order"] = task_order;
  doc["alpha_per_task"] = alpha_per_task;
  doc["strategy"] = replay::to_string(strategy);
  doc["mode"] = transport::to_string(distance.mode);
  doc["method"] = transport::to_string(distance.method);
  doc["seed"] = seed;
  doc["epsilon"] = distance.epsilon ? Json(*distance.epsilon) : Json(nullptr);
  doc["epsilon_scale"] = distance.epsilon_scale;
  doc["tol"] = distance.tol;
  doc["max_iter"] = distance.max_iter;
  doc["cluster_threshold"] = cluster_threshold;
  return doc;
}

RunConfig load_config(const fs::path& path) {
  require_file(path, "config");
  return RunConfig::from_json(io::read_json(path), fs::absolute(path).parent_path());
}

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
  require_file(config_.corpus, "corpus");
  require_file(config_.embeddings, "embeddings");
  require_file(config_.tags, "tags");
  if (config_.tag_embeddings) require_file(*config_.tag_embeddings, "tag embeddings");
  if (config_.instance_embeddings) require_file(*config_.instance_embeddings, "instance embeddings");

  Json hashed;
  hashed["settings"] = config_.settings_json();
  const auto add_input = [&](std::string_view name, const fs::path& path) {
    const std::string bytes = io::read_file(path);
    hashed["inputs"][std::string(name)] = sha256_hex(bytes);
    return bytes;
  };

  corpus_ = corpus::parse_corpus(add_input("corpus", config_.corpus));
  embeddings_ = corpus::parse_embeddings(add_input("embeddings", config_.embeddings));
  tags_ = corpus::parse_tags(add_input("tags", config_.tags));
  std::optional<corpus::EmbeddingTable> tag_embeddings;
  if (config_.tag_embeddings) {
    tag_embeddings = corpus::parse_embeddings(add_input("tag_embeddings", *config_.tag_embeddings));
  }
  if (config_.instance_embeddings) {
    instance_embeddings_ =
        corpus::parse_embeddings(add_input("instance_embeddings", *config_.instance_embeddings));
  }
  config_hash_ = sha256_hex(hashed.dump());

  for (const std::string& id : config_.task_order) order_.push_back(&corpus::find_task(corpus_, id));
  if (config_.strategy == replay::Strategy::kProtoData && !instance_embeddings_) {
    fail(ErrorKind::kValidation, "strategy proto-data needs instance_embeddings in the config");
  }
  canonicalizer_ = taginfo::TagCanonicalizer::build(
      tags_, tag_embeddings ? &*tag_embeddings : nullptr, config_.cluster_threshold);
}

void Pipeline::check_stage(std::size_t stage) const {
  if (stage < 1 || stage > order_.size()) {
    fail(ErrorKind::kValidation, "stage " + std::to_string(stage) + " outside 1.." +
                                     std::to_string(order_.size()));
  }
}

const corpus::TaskDataset& Pipeline::task(std::size_t stage) const {
  check_stage(stage);
  return *order_[stage - 1];
}

taginfo::InstructionPool Pipeline::pool_before(std::size_t stage) const {
  check_stage(stage);
  taginfo::InstructionPool pool;
  for (std::size_t j = 0; j + 1 < stage; ++j) pool.add_task(*order_[j], tags_, canonicalizer_);
  return pool;
}

replay::StageDataset Pipeline::build(std::size_t stage, const taginfo::InstructionPool& pool) const {
  check_stage(stage);
  for (std::size_t j = 0; j < order_.size(); ++j) {
    if (pool.has_task(order_[j]->task_id()) != (j + 1 < stage)) {
      fail(ErrorKind::kValidation, "instruction pool does not match tasks before stage " +
                                       std::to_string(stage));
    }
  }
  std::vector<corpus::TaskDataset> previous;
  for (std::size_t j = 0; j + 1 < stage; ++j) previous.push_back(*order_[j]);

  replay::StageOptions options;
  options.strategy = config_.strategy;
  options.alpha_per_task = config_.alpha_per_task;
  options.distance = config_.distance;
  options.seed = config_.seed;
  const replay::StageInputs inputs{*order_[stage - 1], previous, embeddings_, pool,
                                   instance_embeddings_ ? &*instance_embeddings_ : nullptr};
  return replay::build_stage_dataset(inputs, options);
}

fs::path Pipeline::state_dir() const { return config_.work_dir / "state"; }

StageReport Pipeline::run_stage(std::size_t stage, bool force) {
  check_stage(stage);
  const fs::path state_path = state_dir() / "stages.json";
  std::optional<State> state = read_state(state_path);
  if (state && (state->config_hash != config_hash_ || state->task_order != config_.task_order)) {
    if (!force) {
      fail(ErrorKind::kValidation, "state in " + config_.work_dir.string() +
                                       " was written under a different config; rerun with --force");
    }
    state.reset();
  }
  if (!state) {
    // Stale or absent state: start over so no old artifact survives.
    fs::remove_all(state_dir());
    for (std::size_t s = 1; s <= order_.size(); ++s) fs::remove_all(config_.work_dir / stage_dir(s));
    state = State{config_hash_, config_.task_order, {}};
  }

  taginfo::InstructionPool pool;
  if (stage > 1) {
    const fs::path prior = state_dir() / pool_name(stage - 1);
    if (!state->completed.count(stage - 1) || !fs::exists(prior)) {
      fail(ErrorKind::kSequencing, "stage " + std::to_string(stage) + " needs stage " +
                                       std::to_string(stage - 1) + " to be completed first");
    }
    pool = taginfo::load_pool(prior);
  }

  const replay::StageDataset data = build(stage, pool);
  const fs::path dir = config_.work_dir / stage_dir(stage);
  io::write_file(dir / "distances.json", io::dump(distances_json(data.plan)));
  io::write_file(dir / "plan.json", io::dump(data.plan.to_json()));
  io::write_file(dir / "augmented.jsonl", replay::serialize_augmented(data.rows));

  pool.add_task(task(stage), tags_, canonicalizer_);
  taginfo::save_pool(pool, state_dir() / pool_name(stage));
  state->completed.insert(stage);
  io::write_file(state_path, io::dump(state->to_json()));
  write_manifest();

  StageReport report;
  report.stage = stage;
  report.task_id = task(stage).task_id();
  report.current_rows = task(stage).size();
  report.replay_rows = data.rows.size() - report.current_rows;
  return report;
}

RunSummary Pipeline::run_all(bool force) {
  RunSummary summary;
  std::optional<State> state = read_state(state_dir() / "stages.json");
  if (state && state->config_hash != config_hash_ && !force) {
    fail(ErrorKind::kValidation, "state in " + config_.work_dir.string() +
                                     " was written under a different config; rerun with --force");
  }
  const bool resume = state && state->config_hash == config_hash_ && !force;
  for (std::size_t stage = 1; stage <= order_.size(); ++stage) {
    const fs::path plan = config_.work_dir / stage_dir(stage) / "plan.json";
    if (resume && state->completed.count(stage) && fs::exists(plan) &&
        fs::exists(state_dir() / pool_name(stage))) {
      StageReport skipped;
      skipped.stage = stage;
      skipped.task_id = task(stage).task_id();
      skipped.skipped = true;
      summary.stages.push_back(skipped);
      continue;
    }
    // The first recomputed stage under --force discards the old state.
    summary.stages.push_back(run_stage(stage, force && stage == 1));
  }
  write_manifest();
  summary.manifest = state_dir() / "manifest.json";
  return summary;
}

void Pipeline::write_manifest() const {
  Json artifacts = Json::object();
  const auto add = [&](const fs::path& path) {
    if (fs::exists(path)) {
      artifacts[path.lexically_relative(config_.work_dir).generic_string()] =
          sha256_hex(io::read_file(path));
    }
  };
  for (std::size_t s = 1; s <= order_.size(); ++s) {
    const fs::path dir = config_.work_dir / stage_dir(s);
    add(dir / "distances.json");
    add(dir / "plan.json");
    add(dir / "augmented.jsonl");
  }
  for (std::size_t s = 1; s <= order_.size(); ++s) add(state_dir() / pool_name(s));
  add(state_dir() / "stages.json");

  Json doc;
  doc["config_hash"] = config_hash_;
  doc["artifacts"] = std::move(artifacts);
  io::write_file(state_dir() / "manifest.json", io::dump(doc));
}

Json distances_json(const replay::ReplayPlan& plan) {
  Json doc;
  doc["stage"] = plan.stage;
  doc["mode"] = transport::to_string(plan.mode);
  doc["method"] = transport::to_string(plan.method);
  Json d = Json::object();
  for (const replay::TaskDistance& t : plan.distances) d[t.task_id] = t.value;
  doc["distances"] = std::move(d);
  return doc;
}

}  // namespace instreplay::pipeline
