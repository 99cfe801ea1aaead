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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "genmetrics/csv.hpp"
#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/image.hpp"
#include "genmetrics/manifest.hpp"
#include "genmetrics/summation.hpp"

namespace genmetrics {

// One (real training image, synthetic generation under one seed) comparison.
// Distances are optional in score files; see FillMissingDistances.
struct PrivacyPairRecord {
  std::string prompt_id;
  std::int64_t seed = 0;
  double reid_score = 0.0;
  std::optional<double> pixel_distance;
  std::optional<double> latent_distance;
};

enum class PrivacyAggregation {
  kPerPrompt,  // averages over per-prompt extrema
  kPairs,      // averages over every pair record
};

struct PrivacyConfig {
  double delta = 0.85;
  std::size_t seeds_per_prompt = 10;
  std::size_t num_prompts = 2000;
  PrivacyAggregation aggregation = PrivacyAggregation::kPerPrompt;

  void Validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "privacy.delta must be in (0, 1)");
    }
    if (seeds_per_prompt < 1 || num_prompts < 1) {
      throw Error(ErrorCode::kInvalidConfig,
                  "privacy.seeds_per_prompt and num_prompts must be >= 1");
    }
  }
};

struct PromptExtrema {
  std::string prompt_id;
  double max_reid = 0.0;
  std::optional<double> min_pixel;
  std::optional<double> min_latent;
  std::size_t num_seeds = 0;
};

struct PromptExtremaResult {
  std::vector<PromptExtrema> prompts;  // sorted by prompt_id
  std::vector<std::string> warnings;
};

struct PrivacySummary {
  double avg_reid = 0.0;
  std::optional<double> avg_latent;
  std::optional<double> avg_pixel;
  double max_reid = 0.0;
  std::size_t count_over_delta = 0;
  std::size_t num_units = 0;  // prompts, or pairs under kPairs
  std::vector<PromptExtrema> per_prompt;
  std::vector<std::string> warnings;
};

inline double PixelDistance(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(a.width) + "x" + std::to_string(a.height) +
                    " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height));
  }
  std::vector<double> squares(a.pixels.size());
  for (std::size_t i = 0; i < squares.size(); ++i) {
    const double delta = a.pixels[i] - b.pixels[i];
    squares[i] = delta * delta;
  }
  return std::sqrt(PairwiseSum(squares));
}

// Euclidean distance between the two vectors after scaling each to unit norm.
template <typename T>
double LatentDistance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  std::vector<double> terms(a.size());
  auto norm = [&](std::span<const T> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      terms[i] = static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    return std::sqrt(PairwiseSum(terms));
  };
  const double norm_a = norm(a);
  const double norm_b = norm(b);
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double delta = static_cast<double>(a[i]) / norm_a -
                         static_cast<double>(b[i]) / norm_b;
    terms[i] = delta * delta;
  }
  return std::sqrt(PairwiseSum(terms));
}

inline double LatentDistance(const std::vector<double>& a,
                             const std::vector<double>& b) {
  return LatentDistance<double>(std::span<const double>(a),
                                std::span<const double>(b));
}

namespace privacy_internal {

inline void ValidateRecord(const PrivacyPairRecord& r, const std::string& where) {
  if (!(r.reid_score >= 0.0 && r.reid_score <= 1.0)) {
    throw Error(ErrorCode::kBadValue,
                "reid_score must lie in [0, 1], got " + FormatDouble(r.reid_score),
                where);
  }
  for (const auto& distance : {r.pixel_distance, r.latent_distance}) {
    if (distance && !(std::isfinite(*distance) && *distance >= 0.0)) {
      throw Error(ErrorCode::kBadValue,
                  "distances must be finite and >= 0, got " +
                      FormatDouble(*distance),
                  where);
    }
  }
}

inline std::optional<double> MinOptional(std::optional<double> a,
                                         std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// Mean of the present values, or nullopt when none are present.
inline std::optional<double> MeanOfPresent(
    const std::vector<std::optional<double>>& values) {
  std::vector<double> present;
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) return std::nullopt;
  return PairwiseMean(present);
}

}  // namespace privacy_internal

// For each prompt: max re-id score and min distances over its seeds.
inline PromptExtremaResult PerPromptExtrema(
    std::span<const PrivacyPairRecord> records, const PrivacyConfig& cfg) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no privacy pair records");
  }
  std::map<std::string, PromptExtrema> groups;
  std::map<std::string, std::vector<std::int64_t>> seeds;
  for (const auto& r : records) {
    privacy_internal::ValidateRecord(r, "prompt " + r.prompt_id);
    auto [it, inserted] = groups.try_emplace(r.prompt_id);
    PromptExtrema& g = it->second;
    if (inserted) {
      g.prompt_id = r.prompt_id;
      g.max_reid = r.reid_score;
      g.min_pixel = r.pixel_distance;
      g.min_latent = r.latent_distance;
    } else {
      g.max_reid = std::max(g.max_reid, r.reid_score);
      g.min_pixel = privacy_internal::MinOptional(g.min_pixel, r.pixel_distance);
      g.min_latent =
          privacy_internal::MinOptional(g.min_latent, r.latent_distance);
    }
    ++g.num_seeds;
    seeds[r.prompt_id].push_back(r.seed);
  }

  PromptExtremaResult out;
  out.prompts.reserve(groups.size());
  for (auto& [id, g] : groups) {
    auto& s = seeds[id];
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      out.warnings.push_back("DuplicateSeed: prompt " + id +
                             " lists a seed more than once");
    }
    if (g.num_seeds < cfg.seeds_per_prompt) {
      out.warnings.push_back("ShortGroup: prompt " + id + " has " +
                             std::to_string(g.num_seeds) + " of " +
                             std::to_string(cfg.seeds_per_prompt) +
                             " expected seeds");
    }
    out.prompts.push_back(std::move(g));
  }
  if (out.prompts.size() != cfg.num_prompts) {
    out.warnings.push_back("PromptCount: found " +
                           std::to_string(out.prompts.size()) +
                           " prompts, expected " +
                           std::to_string(cfg.num_prompts));
  }
  return out;
}

// Dataset-level statistics over per-prompt extrema. The delta count is
// strict: a prompt whose max score equals delta is not counted.
inline PrivacySummary SummarizePrivacy(std::span<const PromptExtrema> prompts,
                                       const PrivacyConfig& cfg) {
  cfg.Validate();
  if (prompts.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no prompts to summarize");
  }
  PrivacySummary s;
  std::vector<double> reid(prompts.size());
  std::vector<std::optional<double>> pixel(prompts.size());
  std::vector<std::optional<double>> latent(prompts.size());
  s.max_reid = prompts[0].max_reid;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    reid[i] = prompts[i].max_reid;
    pixel[i] = prompts[i].min_pixel;
    latent[i] = prompts[i].min_latent;
    s.max_reid = std::max(s.max_reid, prompts[i].max_reid);
    if (prompts[i].max_reid > cfg.delta) ++s.count_over_delta;
  }
  s.avg_reid = PairwiseMean(reid);
  s.avg_pixel = privacy_internal::MeanOfPresent(pixel);
  s.avg_latent = privacy_internal::MeanOfPresent(latent);
  s.num_units = prompts.size();
  s.per_prompt.assign(prompts.begin(), prompts.end());
  return s;
}

// Full audit from raw pair records, honouring cfg.aggregation.
inline PrivacySummary AuditPrivacy(std::span<const PrivacyPairRecord> records,
                                   const PrivacyConfig& cfg) {
  cfg.Validate();
  PromptExtremaResult extrema = PerPromptExtrema(records, cfg);
  PrivacySummary s;
  if (cfg.aggregation == PrivacyAggregation::kPerPrompt) {
    s = SummarizePrivacy(extrema.prompts, cfg);
  } else {
    // Pair records sorted by (prompt, seed) so the means are order-free.
    std::vector<const PrivacyPairRecord*> sorted;
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
      return std::tie(a->prompt_id, a->seed, a->reid_score) <
             std::tie(b->prompt_id, b->seed, b->reid_score);
    });
    std::vector<double> reid;
    std::vector<std::optional<double>> pixel, latent;
    s.max_reid = sorted[0]->reid_score;
    for (const auto* r : sorted) {
      reid.push_back(r->reid_score);
      pixel.push_back(r->pixel_distance);
      latent.push_back(r->latent_distance);
      s.max_reid = std::max(s.max_reid, r->reid_score);
      if (r->reid_score > cfg.delta) ++s.count_over_delta;
    }
    s.avg_reid = PairwiseMean(reid);
    s.avg_pixel = privacy_internal::MeanOfPresent(pixel);
    s.avg_latent = privacy_internal::MeanOfPresent(latent);
    s.num_units = sorted.size();
    s.per_prompt = extrema.prompts;
  }
  s.warnings = std::move(extrema.warnings);
  return s;
}

// Score file: prompt_id, seed, reid_score[, pixel_distance, latent_distance].
// Distance cells may be empty.
inline std::vector<PrivacyPairRecord> ParseScoreFile(const CsvTable& csv) {
  const std::size_t prompt_col = csv.RequireColumn("prompt_id");
  const std::size_t seed_col = csv.RequireColumn("seed");
  const std::size_t reid_col = csv.RequireColumn("reid_score");
  const auto pixel_col = csv.FindColumn("pixel_distance");
  const auto latent_col = csv.FindColumn("latent_distance");
  std::vector<PrivacyPairRecord> out;
  out.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::string where = csv.Where(r);
    PrivacyPairRecord rec;
    rec.prompt_id = row[prompt_col];
    rec.seed = ParseInt(row[seed_col], where);
    rec.reid_score = ParseDouble(row[reid_col], where);
    if (pixel_col && !row[*pixel_col].empty()) {
      rec.pixel_distance = ParseDouble(row[*pixel_col], where);
    }
    if (latent_col && !row[*latent_col].empty()) {
      rec.latent_distance = ParseDouble(row[*latent_col], where);
    }
    privacy_internal::ValidateRecord(rec, where);
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<PrivacyPairRecord> ReadScoreFile(const std::string& path) {
  return ParseScoreFile(ReadCsv(path));
}

inline std::string ScoresToCsv(std::span<const PrivacyPairRecord> records) {
  std::string out = "prompt_id,seed,reid_score,pixel_distance,latent_distance\n";
  for (const auto& r : records) {
    out += CsvEscape(r.prompt_id) + ',' + std::to_string(r.seed) + ',' +
           FormatDouble(r.reid_score) + ',' +
           (r.pixel_distance ? FormatDouble(*r.pixel_distance) : "") + ',' +
           (r.latent_distance ? FormatDouble(*r.latent_distance) : "") + '\n';
  }
  return out;
}

// Where to find the inputs for distances a score file leaves empty. The real
// image for a prompt is the non-synthetic manifest record with that
// prompt_id; the synthetic one also matches the seed.
struct PairSources {
  const SampleManifest* real_manifest = nullptr;
  const SampleManifest* fake_manifest = nullptr;
  const EmbeddingMatrix* real_embeddings = nullptr;
  const EmbeddingMatrix* fake_embeddings = nullptr;
  std::string images_root;
  std::size_t image_side = 224;
};

inline void FillMissingDistances(std::vector<PrivacyPairRecord>& records,
                                 const PairSources& sources) {
  if (!sources.real_manifest || !sources.fake_manifest) return;
  std::map<std::string, const SampleRecord*> real_by_prompt;
  for (const auto& r : sources.real_manifest->records) {
    if (r.split != Split::kSynthetic) real_by_prompt.emplace(r.prompt_id, &r);
  }
  std::map<std::pair<std::string, std::int64_t>, const SampleRecord*> fake_by_key;
  for (const auto& r : sources.fake_manifest->records) {
    if (r.split == Split::kSynthetic && r.seed) {
      fake_by_key.emplace(std::make_pair(r.prompt_id, *r.seed), &r);
    }
  }
  auto resolve_path = [&](const std::string& p) {
    if (sources.images_root.empty() || (!p.empty() && p.front() == '/')) return p;
    return sources.images_root + "/" + p;
  };
  auto embedding_row = [](const EmbeddingMatrix& m, const std::string& id) {
    auto index = m.IndexOf(id);
    if (!index) {
      throw Error(ErrorCode::kIdAlignmentError,
                  "sample " + id + " missing from embeddings");
    }
    return m.Row(*index);
  };
  std::map<std::string, GrayImage> image_cache;
  auto image = [&](const SampleRecord& r) -> const GrayImage& {
    auto it = image_cache.find(r.sample_id);
    if (it == image_cache.end()) {
      it = image_cache
               .emplace(r.sample_id, LoadGrayImage(resolve_path(r.image_path),
                                                   sources.image_side))
               .first;
    }
    return it->second;
  };

  for (auto& rec : records) {
    if (rec.pixel_distance && rec.latent_distance) continue;
    const std::string key = rec.prompt_id + "/seed " + std::to_string(rec.seed);
    auto real_it = real_by_prompt.find(rec.prompt_id);
    auto fake_it = fake_by_key.find({rec.prompt_id, rec.seed});
    if (real_it == real_by_prompt.end() || fake_it == fake_by_key.end()) {
      throw Error(ErrorCode::kIdAlignmentError,
                  "cannot resolve real/synthetic pair for " + key);
    }
    const SampleRecord& real = *real_it->second;
    const SampleRecord& fake = *fake_it->second;
    if (!rec.pixel_distance) {
      rec.pixel_distance = PixelDistance(image(real), image(fake));
      if (image_cache.size() > 4096) image_cache.clear();
    }
    if (!rec.latent_distance && sources.real_embeddings &&
        sources.fake_embeddings) {
      rec.latent_distance =
          LatentDistance(embedding_row(*sources.real_embeddings, real.sample_id),
                         embedding_row(*sources.fake_embeddings, fake.sample_id));
    }
  }
}

}  // namespace genmetrics
