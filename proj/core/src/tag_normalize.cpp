// Copyright 2026 The instreplay Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "instreplay/error.hpp"
#include "instreplay/taginfo.hpp"
#include "instreplay/text.hpp"
#include "instreplay/transport.hpp"

namespace instreplay::taginfo {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool has_vowel(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_vowel(c) || c == 'y'; });
}

bool is_consonant(char c) { return c >= 'a' && c <= 'z' && !is_vowel(c); }

std::size_t vowel_groups(std::string_view s) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : s) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

const std::unordered_map<std::string_view, std::string_view>& irregular() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"children", "child"}, {"men", "man"},         {"women", "woman"},
      {"people", "person"},  {"mice", "mouse"},      {"feet", "foot"},
      {"teeth", "tooth"},    {"geese", "goose"},     {"criteria", "criterion"},
      {"phenomena", "phenomenon"}, {"analyses", "analysis"}, {"hypotheses", "hypothesis"},
      {"indices", "index"},  {"matrices", "matrix"}, {"written", "write"},
      {"lives", "life"},     {"leaves", "leaf"},     {"wolves", "wolf"},
  };
  return table;
}

// Words that look inflected but are not.
const std::unordered_map<std::string_view, bool>& invariant() {
  static const std::unordered_map<std::string_view, bool> table = [] {
    std::unordered_map<std::string_view, bool> t;
    for (std::string_view w :
         {"news", "series", "species", "physics", "mathematics", "economics", "ethics",
          "statistics", "linguistics", "analysis", "basis", "thesis", "synopsis", "status",
          "bus", "gas", "this", "is", "was", "has", "as", "us", "yes", "always", "perhaps",
          "lens", "bias", "alias", "atlas", "canvas", "chaos", "corpus", "focus", "census",
          "thing", "something", "nothing", "everything", "anything", "string", "king",
          "ring", "sing", "wing", "spring", "bring", "during", "morning", "evening",
          "ceiling", "wedding", "pudding", "bed", "red", "need", "seed", "feed", "speed",
          "embed", "shed", "hundred", "breed", "sled", "wicked", "naked", "sacred"}) {
      t.emplace(w, true);
    }
    return t;
  }();
  return table;
}

// Repairs after removing -ing / -ed.
std::string repair_stem(std::string stem) {
  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
    return stem;
  }
  // No English word ends in v (solv -> solve, sav -> save).
  if (stem.back() == 'v') return stem + "e";
  // Short stems ending consonant-vowel-consonant lost a silent e
  // (writ -> write, hop -> hope).
  if (n >= 3 && vowel_groups(stem) == 1 && is_consonant(stem[n - 3]) && is_vowel(stem[n - 2]) &&
      is_consonant(stem[n - 1]) && stem[n - 1] != 'w' && stem[n - 1] != 'x' &&
      stem[n - 1] != 'y') {
    return stem + "e";
  }
  return stem;
}

}  // namespace

std::string SuffixLemmatizer::lemmatize(std::string_view token) const {
  if (const auto it = irregular().find(token); it != irregular().end()) {
    return std::string(it->second);
  }
  if (token.size() <= 3 || invariant().count(token) != 0) return std::string(token);
  // Multi-byte or digit-bearing tokens are left alone.
  if (!std::all_of(token.begin(), token.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
    return std::string(token);
  }

  const std::string w(token);
  if (ends_with(w, "sses")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "ies")) return w.size() > 4 ? w.substr(0, w.size() - 3) + "y" : w.substr(0, w.size() - 1);
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes")) {
    return w.substr(0, w.size() - 2);
  }
  if (ends_with(w, "s")) return w.substr(0, w.size() - 1);
  if (ends_with(w, "eed")) return w;
  if (ends_with(w, "ied")) return w.size() > 4 ? w.substr(0, w.size() - 3) + "y" : w.substr(0, w.size() - 1);
  if (ends_with(w, "ing")) {
    const std::string stem = w.substr(0, w.size() - 3);
    if (stem.size() >= 3 && has_vowel(stem)) return repair_stem(stem);
    return w;
  }
  if (ends_with(w, "ed")) {
    const std::string stem = w.substr(0, w.size() - 2);
    if (stem.size() >= 3 && has_vowel(stem)) return repair_stem(stem);
    return w;
  }
  return w;
}

const Lemmatizer& default_lemmatizer() {
  static const SuffixLemmatizer instance;
  return instance;
}

std::string normalize_rule(std::string_view raw_tag, const Lemmatizer& lemmatizer) {
  std::vector<std::string> tokens;
  std::string current;
  for (const text::CodePoint& cp : text::decode(text::nfc(raw_tag))) {
    if (cp.cls == text::CharClass::kAlnum) {
      text::append_utf8(current, text::to_lower(cp.value));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));

  std::string out;
  for (const std::string& token : tokens) {
    std::string lemma = token;
    // Iterate to a fixed point so normalization is idempotent.
    for (int round = 0; round < 8; ++round) {
      std::string next = lemmatizer.lemmatize(lemma);
      if (next == lemma || next.empty()) break;
      lemma = std::move(next);
    }
    if (!out.empty()) out += ' ';
    out += lemma;
  }
  return text::nfc(out);
}

CanonicalMap semantic_aggregate(std::span<const std::string> tags,
                                const corpus::EmbeddingTable& tag_embeddings, double threshold,
                                std::size_t min_points) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorKind::kValidation, "cluster threshold must lie in (0, 1)");
  }
  if (min_points == 0) fail(ErrorKind::kValidation, "min_points must be positive");

  std::vector<std::string> sorted(tags.begin(), tags.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<std::span<const double>> vectors;
  vectors.reserve(n);
  for (const std::string& tag : sorted) vectors.push_back(tag_embeddings.at(tag));

  // Neighborhoods include the point itself, as in standard DBSCAN.
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) neighbors[i].push_back(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (transport::cosine_distance(vectors[i], vectors[j]) <= threshold) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }
    }
  }

  constexpr long kUnvisited = -2;
  constexpr long kNoise = -1;
  std::vector<long> label(n, kUnvisited);
  long next_cluster = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    if (neighbors[p].size() < min_points) {
      label[p] = kNoise;
      continue;
    }
    const long cluster = next_cluster++;
    label[p] = cluster;
    std::deque<std::size_t> frontier(neighbors[p].begin() + 1, neighbors[p].end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (label[q] == kNoise) {
        label[q] = cluster;  // border point, already known not to be core
        continue;
      }
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      if (neighbors[q].size() >= min_points) {
        for (std::size_t r : neighbors[q]) {
          if (label[r] == kUnvisited || label[r] == kNoise) frontier.push_back(r);
        }
      }
    }
  }

  // Members are visited in sorted order, so the first seen is the smallest.
  std::vector<std::size_t> representative(static_cast<std::size_t>(next_cluster), n);
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0 && representative[static_cast<std::size_t>(label[i])] == n) {
      representative[static_cast<std::size_t>(label[i])] = i;
    }
  }
  CanonicalMap out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace(sorted[i], label[i] >= 0 ? sorted[representative[static_cast<std::size_t>(label[i])]]
                                         : sorted[i]);
  }
  return out;
}

TagCanonicalizer::TagCanonicalizer() : TagCanonicalizer(CanonicalMap{}, kDefaultClusterThreshold) {}

TagCanonicalizer::TagCanonicalizer(CanonicalMap semantic_map, double threshold,
                                   std::shared_ptr<const Lemmatizer> lemmatizer)
    : semantic_map_(std::move(semantic_map)),
      threshold_(threshold),
      lemmatizer_(lemmatizer ? std::move(lemmatizer)
                             : std::shared_ptr<const Lemmatizer>(std::make_shared<SuffixLemmatizer>())) {
  for (const auto& [tag, canon] : semantic_map_) {
    const auto it = semantic_map_.find(canon);
    if (it != semantic_map_.end() && it->second != canon) {
      fail(ErrorKind::kValidation, "canonical map is not idempotent at \"" + tag + "\"");
    }
  }
}

TagCanonicalizer TagCanonicalizer::build(const corpus::TagTable& raw,
                                         const corpus::EmbeddingTable* tag_embeddings,
                                         double threshold,
                                         std::shared_ptr<const Lemmatizer> lemmatizer) {
  TagCanonicalizer rule_only(CanonicalMap{}, threshold, std::move(lemmatizer));
  if (tag_embeddings == nullptr) return rule_only;

  std::set<std::string> normalized;
  for (const auto& [instruction, tags] : raw) {
    for (const std::string& tag : tags) {
      std::string norm = normalize_rule(tag, *rule_only.lemmatizer_);
      if (!norm.empty()) normalized.insert(std::move(norm));
    }
  }
  std::vector<std::string> list(normalized.begin(), normalized.end());
  return TagCanonicalizer(semantic_aggregate(list, *tag_embeddings, threshold), threshold,
                          rule_only.lemmatizer_);
}

std::string TagCanonicalizer::canonical(std::string_view raw_tag) const {
  std::string norm = normalize_rule(raw_tag, *lemmatizer_);
  const auto it = semantic_map_.find(norm);
  return it == semantic_map_.end() ? norm : it->second;
}

std::vector<std::string> TagCanonicalizer::canonicalize(std::span<const std::string> raw_tags) const {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  for (const std::string& raw : raw_tags) {
    std::string canon = canonical(raw);
    if (canon.empty() || !seen.insert(canon).second) continue;
    out.push_back(std::move(canon));
  }
  return out;
}

corpus::TagTable TagCanonicalizer::apply(const corpus::TagTable& raw) const {
  corpus::TagTable out;
  for (const auto& [instruction, tags] : raw) out.emplace(instruction, canonicalize(tags));
  return out;
}

}  // namespace instreplay::taginfo
