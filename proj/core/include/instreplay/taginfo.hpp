// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "instreplay/corpus.hpp"

namespace instreplay::taginfo {

inline constexpr double kDefaultClusterThreshold = 0.1;
inline constexpr std::size_t kDefaultMinPoints = 2;

// Maps one lowercase alphanumeric token to its base form.
class Lemmatizer {
 public:
  virtual ~Lemmatizer() = default;
  virtual std::string lemmatize(std::string_view token) const = 0;
};

class IdentityLemmatizer final : public Lemmatizer {
 public:
  std::string lemmatize(std::string_view token) const override { return std::string(token); }
};

// English suffix stripper: plurals (-s, -es, -ies), -ing and -ed with the
// usual undoubling / silent-e repairs, plus an exceptions list. Every rewrite
// shortens the token, so iterating it reaches a fixed point.
class SuffixLemmatizer final : public Lemmatizer {
 public:
  std::string lemmatize(std::string_view token) const override;
};

const Lemmatizer& default_lemmatizer();

// Rule aggregation: NFC, every non-alphanumeric code point becomes a space,
// lowercase, collapse and trim whitespace, lemmatize each token (to a fixed
// point). Idempotent. May return an empty string.
std::string normalize_rule(std::string_view raw_tag,
                           const Lemmatizer& lemmatizer = default_lemmatizer());

// tag -> canonical tag. Idempotent: every canonical tag maps to itself.
using CanonicalMap = std::map<std::string, std::string, std::less<>>;

// Semantic aggregation: DBSCAN over the tags with neighborhood
// cosine_distance <= threshold. Each cluster maps to its lexicographically
// smallest member; noise maps to itself. Every tag needs an embedding.
CanonicalMap semantic_aggregate(std::span<const std::string> tags,
                                const corpus::EmbeddingTable& tag_embeddings,
                                double threshold = kDefaultClusterThreshold,
                                std::size_t min_points = kDefaultMinPoints);

// Raw tag -> canonical tag: rule normalization followed by the semantic map
// (tags absent from the map are their own canonical form).
class TagCanonicalizer {
 public:
  TagCanonicalizer();
  TagCanonicalizer(CanonicalMap semantic_map, double threshold,
                   std::shared_ptr<const Lemmatizer> lemmatizer = nullptr);

  // Rule-normalizes every tag in `raw`, then clusters the results when
  // `tag_embeddings` is given. Without embeddings only rule aggregation runs.
  static TagCanonicalizer build(const corpus::TagTable& raw,
                                const corpus::EmbeddingTable* tag_embeddings,
                                double threshold = kDefaultClusterThreshold,
                                std::shared_ptr<const Lemmatizer> lemmatizer = nullptr);

  std::string canonical(std::string_view raw_tag) const;

  // Canonical forms of `raw_tags`, empties dropped, duplicates removed,
  // first-appearance order kept.
  std::vector<std::string> canonicalize(std::span<const std::string> raw_tags) const;

  corpus::TagTable apply(const corpus::TagTable& raw) const;

  const CanonicalMap& semantic_map() const noexcept { return semantic_map_; }
  double threshold() const noexcept { return threshold_; }
  const Lemmatizer& lemmatizer() const noexcept { return *lemmatizer_; }

 private:
  CanonicalMap semantic_map_;
  double threshold_;
  std::shared_ptr<const Lemmatizer> lemmatizer_;
};

// Cross-stage memory of every instruction seen so far. total() is N and
// frequency(t) is f_t: the number of instructions whose tag list contains t.
class InstructionPool {
 public:
  struct Entry {
    std::vector<std::string> tags;   // canonical, deduplicated
    std::vector<std::string> tasks;  // tasks the instruction occurs in

    friend bool operator==(const Entry&, const Entry&) = default;
  };
  using Entries = std::map<std::string, Entry, std::less<>>;
  using Frequencies = std::map<std::string, std::size_t, std::less<>>;

  std::size_t total() const noexcept { return entries_.size(); }
  std::size_t frequency(std::string_view tag) const;
  const Entries& entries() const noexcept { return entries_; }
  const Frequencies& frequencies() const noexcept { return freq_; }

  bool contains(std::string_view instruction) const;
  bool has_task(std::string_view task_id) const;
  const Entry& at(std::string_view instruction) const;

  // Instructions recorded for `task_id`, in sorted order.
  std::vector<std::string> task_instructions(std::string_view task_id) const;

  // Inserts the task's distinct instructions. An instruction already present
  // (shared with an earlier task) keeps its tags and gains the task id.
  // State error if the task was inserted before.
  void add_task(const corpus::TaskDataset& task, const corpus::TagTable& tags,
                const TagCanonicalizer& canonicalizer);

  // Recounts total and frequencies from the entries; state error on mismatch.
  void check_consistency() const;

  nlohmann::ordered_json to_json() const;
  static InstructionPool from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const InstructionPool&, const InstructionPool&) = default;

 private:
  Entries entries_;
  Frequencies freq_;
  std::set<std::string, std::less<>> tasks_;
};

InstructionPool update_pool(InstructionPool pool, const corpus::TaskDataset& task,
                            const corpus::TagTable& tags, const TagCanonicalizer& canonicalizer);

// Information score of a pooled instruction: sum over its canonical tags of
// ln(N / f_t). Zero for an untagged instruction. Lookup error when the
// instruction is not in the pool.
double insinfo(std::string_view instruction, const InstructionPool& pool);

void save_pool(const InstructionPool& pool, const std::filesystem::path& path);
InstructionPool load_pool(const std::filesystem::path& path);

}  // namespace instreplay::taginfo
