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
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/gaussian.hpp"
#include "genmetrics/kid.hpp"
#include "genmetrics/manifest.hpp"
#include "genmetrics/parallel.hpp"
#include "genmetrics/prdc.hpp"
#include "genmetrics/random.hpp"
#include "genmetrics/summation.hpp"

namespace genmetrics {

struct Stratum {
  std::string label_name;
  std::vector<std::string> real_ids;
  std::vector<std::string> fake_ids;
  std::size_t real_count = 0;
};

// One stratum per condition, in kLabelNames order. Synthetic records go to
// fake_ids, everything else to real_ids; a multi-label sample lands in every
// matching stratum.
inline std::vector<Stratum> Stratify(const SampleManifest& manifest) {
  std::vector<Stratum> strata(kNumLabels);
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    strata[l].label_name = std::string(kLabelNames[l]);
  }
  for (const auto& record : manifest.records) {
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      if (!record.labels.test(l)) continue;
      auto& ids = record.split == Split::kSynthetic ? strata[l].fake_ids
                                                    : strata[l].real_ids;
      ids.push_back(record.sample_id);
    }
  }
  for (auto& s : strata) s.real_count = s.real_ids.size();
  return strata;
}

inline std::vector<Stratum> Stratify(const SampleManifest& real,
                                     const SampleManifest& fake) {
  std::vector<Stratum> strata = Stratify(real);
  const std::vector<Stratum> fake_strata = Stratify(fake);
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    auto& dst = strata[l].fake_ids;
    const auto& src = fake_strata[l];
    dst.insert(dst.end(), src.fake_ids.begin(), src.fake_ids.end());
    // A fake manifest may also be tagged train/test; its rows still count as
    // generated samples here.
    dst.insert(dst.end(), src.real_ids.begin(), src.real_ids.end());
  }
  return strata;
}

// Number of samples carrying each label, kLabelNames order.
inline std::array<std::size_t, kNumLabels> PrevalenceCounts(
    const SampleManifest& manifest) {
  std::array<std::size_t, kNumLabels> counts{};
  for (const auto& record : manifest.records) {
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      counts[l] += record.labels.test(l) ? 1 : 0;
    }
  }
  return counts;
}

struct ConditionalConfig {
  // When set, strata with fewer real or fake samples are skipped outright.
  // When unset, FID/KID need 2 samples per side and PRDC needs k + 1.
  std::optional<std::size_t> min_stratum;
  KidConfig kid;
  PrdcConfig prdc;
};

struct StratumResult {
  std::string label_name;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  bool skipped = false;
  std::string skip_reason;
  std::optional<double> fid;
  std::optional<double> kid_mean;
  std::optional<double> kid_std;
  std::optional<PrdcResult> prdc;
  std::string prdc_skip_reason;
  double regularization_real = 0.0;
  double regularization_fake = 0.0;
};

struct ConditionalReport {
  std::vector<StratumResult> strata;  // kLabelNames order
};

namespace conditional_internal {

// Rows of `m` whose id is in `ids`, kept in the matrix's own row order so a
// stratum covering every row reproduces the input exactly.
inline EmbeddingMatrix Restrict(const EmbeddingMatrix& m,
                                const std::vector<std::string>& ids,
                                const char* side) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto index = m.IndexOf(id);
    if (!index) {
      throw Error(ErrorCode::kIdAlignmentError,
                  std::string(side) + " sample '" + id +
                      "' is not in the embedding matrix");
    }
    rows.push_back(*index);
  }
  std::sort(rows.begin(), rows.end());
  return m.SelectRows(rows);
}

}  // namespace conditional_internal

// Fidelity and coverage metrics computed independently inside each stratum.
// Stratum l draws its KID subsets from stream l of cfg.kid.rng_seed.
inline ConditionalReport ConditionalMetrics(const EmbeddingMatrix& real,
                                            const EmbeddingMatrix& fake,
                                            const SampleManifest& real_manifest,
                                            const SampleManifest& fake_manifest,
                                            const ConditionalConfig& cfg,
                                            const Executor& exec = Executor()) {
  using conditional_internal::Restrict;
  cfg.kid.Validate();
  cfg.prdc.Validate();
  if (real.dim() != fake.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(real.dim()) + " vs " + std::to_string(fake.dim()));
  }
  const std::vector<Stratum> strata = Stratify(real_manifest, fake_manifest);
  const std::size_t fid_floor = cfg.min_stratum.value_or(2);
  const std::size_t prdc_floor =
      std::max(cfg.min_stratum.value_or(0), cfg.prdc.k + 1);

  ConditionalReport report;
  report.strata.resize(strata.size());
  for (std::size_t l = 0; l < strata.size(); ++l) {
    const Stratum& s = strata[l];
    StratumResult& out = report.strata[l];
    out.label_name = s.label_name;
    // Alignment is checked even for strata that end up skipped.
    const EmbeddingMatrix r = Restrict(real, s.real_ids, "real");
    const EmbeddingMatrix f = Restrict(fake, s.fake_ids, "fake");
    out.n_real = r.rows();
    out.n_fake = f.rows();
    if (out.n_real < fid_floor || out.n_fake < fid_floor) {
      out.skipped = true;
      out.skip_reason = "too few samples";
      continue;
    }
    GaussianStats real_stats = FitGaussian(r, 0.0, exec);
    GaussianStats fake_stats = FitGaussian(f, 0.0, exec);
    RegularizeIfSingular(real_stats);
    RegularizeIfSingular(fake_stats);
    out.regularization_real = real_stats.regularization_epsilon;
    out.regularization_fake = fake_stats.regularization_epsilon;
    out.fid = FrechetDistance(real_stats, fake_stats);

    KidConfig kid = cfg.kid;
    kid.rng_seed = CounterRng(cfg.kid.rng_seed, l).Next();
    const std::size_t available = std::min(out.n_real, out.n_fake);
    kid.subset_size =
        std::min(cfg.kid.subset_size.value_or(std::size_t{1000}), available);
    const KidResult k = Kid(r, f, kid, exec);
    out.kid_mean = k.mean;
    out.kid_std = k.std;

    if (out.n_real < prdc_floor || out.n_fake < prdc_floor) {
      out.prdc_skip_reason = "fewer than k+1 samples";
    } else {
      out.prdc = Prdc(r, f, cfg.prdc, exec);
    }
  }
  return report;
}

}  // namespace genmetrics
