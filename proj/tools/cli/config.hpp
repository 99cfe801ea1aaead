// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "genmetrics/error.hpp"
#include "genmetrics/kid.hpp"
#include "genmetrics/leaderboard.hpp"
#include "genmetrics/prdc.hpp"
#include "genmetrics/privacy.hpp"

namespace genmetrics::cli {

// One side of a correlation: a column from a keyed CSV table, or from the
// rank table computed by `rank` when `table` is empty.
struct ColumnRef {
  std::string table;
  std::string column;
  std::optional<Direction> rank;  // convert values to ranks first
};

struct CorrelationSpec {
  std::string name;
  ColumnRef x;
  ColumnRef y;
  std::string method = "pearson";  // pearson | spearman
};

struct RankSettings {
  std::string table;
  std::map<std::string, Direction> directions;
  std::optional<Direction> default_direction;
  std::vector<CorrelationSpec> correlations;
};

struct ReportSettings {
  std::string title = "Evaluation report";
  std::string fidelity_table;
  std::string pathology_table;
  std::string privacy_table;
  std::map<std::string, Direction> directions;
};

struct RunConfig {
  std::string real_embeddings;
  std::string fake_embeddings;
  std::string real_manifest;
  std::string fake_manifest;
  std::string images_root;
  std::string scores;
  std::string alignment_scores;

  KidConfig kid;
  PrdcConfig prdc;
  PrivacyConfig privacy;
  std::size_t image_side = 224;
  std::optional<std::size_t> min_stratum;
  RankSettings rank;
  ReportSettings report;

  std::string output_dir = "genmetrics-out";
  std::uint64_t rng_seed = 42;
  std::size_t threads = 1;

  // The effective configuration minus settings that cannot change results
  // (thread count, output location); hashed into the run record.
  nlohmann::json canonical;
};

namespace config_internal {

inline const nlohmann::json* Find(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

template <typename T>
void Get(const nlohmann::json& j, const char* key, T& out,
         const std::string& section) {
  if (const auto* v = Find(j, key)) {
    try {
      out = v->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kConfigParseError,
                  "bad type for " + section + key + ": " + v->dump());
    }
  }
}

inline std::map<std::string, Direction> Directions(const nlohmann::json& j) {
  std::map<std::string, Direction> out;
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigParseError, "directions must be an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    out.emplace(it.key(), ParseDirection(it.value().get<std::string>()));
  }
  return out;
}

inline ColumnRef ParseColumnRef(const nlohmann::json& j) {
  ColumnRef ref;
  Get(j, "table", ref.table, "rank.correlations.");
  Get(j, "column", ref.column, "rank.correlations.");
  if (ref.column.empty()) {
    throw Error(ErrorCode::kConfigParseError,
                "correlation source needs a column");
  }
  if (const auto* rank = Find(j, "rank")) {
    ref.rank = ParseDirection(rank->get<std::string>());
  }
  return ref;
}

inline std::size_t ResolveThreads(const nlohmann::json* value) {
  auto automatic = [] {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : hw);
  };
  auto from_text = [&](const std::string& text) -> std::size_t {
    if (text == "auto") return automatic();
    try {
      const long n = std::stol(text);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kConfigParseError,
                "threads must be a positive integer or \"auto\", got " + text);
  };
  if (value) {
    if (value->is_number_integer()) return from_text(std::to_string(value->get<long>()));
    if (value->is_string()) return from_text(value->get<std::string>());
    throw Error(ErrorCode::kConfigParseError, "threads: " + value->dump());
  }
  if (const char* env = std::getenv("GENMETRICS_THREADS"); env && *env) {
    return from_text(env);
  }
  return automatic();
}

}  // namespace config_internal

inline RunConfig ParseRunConfig(const nlohmann::json& doc) {
  using namespace config_internal;
  if (!doc.is_object()) {
    throw Error(ErrorCode::kConfigParseError, "config must be a JSON object");
  }
  RunConfig c;
  try {
    if (const auto* paths = Find(doc, "paths")) {
      Get(*paths, "real_embeddings", c.real_embeddings, "paths.");
      Get(*paths, "fake_embeddings", c.fake_embeddings, "paths.");
      Get(*paths, "real_manifest", c.real_manifest, "paths.");
      Get(*paths, "fake_manifest", c.fake_manifest, "paths.");
      Get(*paths, "images_root", c.images_root, "paths.");
      Get(*paths, "scores", c.scores, "paths.");
      Get(*paths, "alignment_scores", c.alignment_scores, "paths.");
    }
    Get(doc, "output_dir", c.output_dir, "");
    Get(doc, "rng_seed", c.rng_seed, "");
    c.threads = ResolveThreads(Find(doc, "threads"));

    if (const auto* kid = Find(doc, "kid")) {
      Get(*kid, "degree", c.kid.kernel_degree, "kid.");
      Get(*kid, "coef", c.kid.kernel_coef, "kid.");
      Get(*kid, "num_subsets", c.kid.num_subsets, "kid.");
      if (const auto* g = Find(*kid, "gamma"); g && !(g->is_string() && *g == "auto")) {
        c.kid.kernel_gamma = g->get<double>();
      }
      if (const auto* s = Find(*kid, "subset_size");
          s && !(s->is_string() && *s == "auto")) {
        c.kid.subset_size = s->get<std::size_t>();
      }
    }
    c.kid.rng_seed = c.rng_seed;
    if (const auto* prdc = Find(doc, "prdc")) Get(*prdc, "k", c.prdc.k, "prdc.");
    if (const auto* privacy = Find(doc, "privacy")) {
      Get(*privacy, "delta", c.privacy.delta, "privacy.");
      Get(*privacy, "seeds_per_prompt", c.privacy.seeds_per_prompt, "privacy.");
      Get(*privacy, "num_prompts", c.privacy.num_prompts, "privacy.");
      Get(*privacy, "image_side", c.image_side, "privacy.");
      std::string aggregation = "per_prompt";
      Get(*privacy, "aggregation", aggregation, "privacy.");
      if (aggregation == "per_prompt") {
        c.privacy.aggregation = PrivacyAggregation::kPerPrompt;
      } else if (aggregation == "pairs") {
        c.privacy.aggregation = PrivacyAggregation::kPairs;
      } else {
        throw Error(ErrorCode::kConfigParseError,
                    "privacy.aggregation must be per_prompt or pairs");
      }
    }
    if (const auto* cond = Find(doc, "conditional")) {
      if (const auto* m = Find(*cond, "min_stratum")) {
        c.min_stratum = m->get<std::size_t>();
      }
    }
    if (const auto* rank = Find(doc, "rank")) {
      Get(*rank, "table", c.rank.table, "rank.");
      if (const auto* d = Find(*rank, "directions")) c.rank.directions = Directions(*d);
      if (const auto* d = Find(*rank, "default_direction")) {
        c.rank.default_direction = ParseDirection(d->get<std::string>());
      }
      if (const auto* list = Find(*rank, "correlations")) {
        for (const auto& item : *list) {
          CorrelationSpec spec;
          Get(item, "name", spec.name, "rank.correlations.");
          Get(item, "method", spec.method, "rank.correlations.");
          if (spec.method != "pearson" && spec.method != "spearman") {
            throw Error(ErrorCode::kConfigParseError,
                        "correlation method must be pearson or spearman");
          }
          const auto* x = Find(item, "x");
          const auto* y = Find(item, "y");
          if (!x || !y) {
            throw Error(ErrorCode::kConfigParseError, "correlation needs x and y");
          }
          spec.x = ParseColumnRef(*x);
          spec.y = ParseColumnRef(*y);
          c.rank.correlations.push_back(std::move(spec));
        }
      }
    }
    if (const auto* report = Find(doc, "report")) {
      Get(*report, "title", c.report.title, "report.");
      Get(*report, "fidelity_table", c.report.fidelity_table, "report.");
      Get(*report, "pathology_table", c.report.pathology_table, "report.");
      Get(*report, "privacy_table", c.report.privacy_table, "report.");
      if (const auto* d = Find(*report, "directions")) {
        c.report.directions = Directions(*d);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigParseError, e.what());
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::kConfig) throw;
    throw Error(ErrorCode::kConfigParseError, e.message(), e.context());
  }
  c.kid.Validate();
  c.prdc.Validate();
  c.privacy.Validate();

  nlohmann::json canonical = doc;
  canonical.erase("threads");
  canonical.erase("output_dir");
  canonical["rng_seed"] = c.rng_seed;
  c.canonical = std::move(canonical);
  return c;
}

}  // namespace genmetrics::cli
