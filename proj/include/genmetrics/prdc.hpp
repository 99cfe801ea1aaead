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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/parallel.hpp"

namespace genmetrics {

struct PrdcConfig {
  std::size_t k = 5;

  void Validate() const {
    if (k < 1) throw Error(ErrorCode::kInvalidConfig, "prdc.k must be >= 1");
  }
};

struct PrdcResult {
  double precision = 0.0;
  double recall = 0.0;
  double density = 0.0;
  double coverage = 0.0;
};

namespace prdc_internal {

using RowMatrixD =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kBlockRows = 64;

// Exact Euclidean distance. Symmetric in its arguments bit for bit, so
// d(a, b) computed for a radius and d(b, a) computed for a membership test
// always agree.
inline double Distance(const double* a, const double* b, std::size_t d) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= d; i += 4) {
    for (std::size_t lane = 0; lane < 4; ++lane) {
      const double delta = a[i + lane] - b[i + lane];
      acc[lane] += delta * delta;
    }
  }
  for (; i < d; ++i) {
    const double delta = a[i] - b[i];
    acc[0] += delta * delta;
  }
  return std::sqrt((acc[0] + acc[1]) + (acc[2] + acc[3]));
}

inline RowMatrixD Widen(const EmbeddingMatrix& m) {
  return m.values().cast<double>();
}

inline std::vector<double> KnnRadii(const RowMatrixD& points, std::size_t k,
                                    const Executor& exec) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto d = static_cast<std::size_t>(points.cols());
  std::vector<double> radii(n);
  exec.ForEach(NumBlocks(n, kBlockRows), [&](std::size_t block) {
    const BlockRange range = Block(block, n, kBlockRows);
    std::vector<double> distances;
    distances.reserve(n - 1);
    for (std::size_t i = range.begin; i < range.end; ++i) {
      distances.clear();
      const double* p = points.row(static_cast<Eigen::Index>(i)).data();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        distances.push_back(
            Distance(p, points.row(static_cast<Eigen::Index>(j)).data(), d));
      }
      auto kth = distances.begin() + static_cast<std::ptrdiff_t>(k - 1);
      std::nth_element(distances.begin(), kth, distances.end());
      radii[i] = *kth;
    }
  });
  return radii;
}

}  // namespace prdc_internal

// Distance from each point to its k-th nearest other point. Coincident points
// count as separate neighbours at distance 0.
inline std::vector<double> KnnRadii(const EmbeddingMatrix& points,
                                    std::size_t k,
                                    const Executor& exec = Executor()) {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (points.rows() < k + 1) {
    throw Error(ErrorCode::kTooFewPoints,
                "need at least k+1 = " + std::to_string(k + 1) +
                    " points, got " + std::to_string(points.rows()));
  }
  return prdc_internal::KnnRadii(prdc_internal::Widen(points), k, exec);
}

// Precision, recall, density and coverage with k-NN balls; a point exactly on
// a ball's boundary is inside it.
inline PrdcResult Prdc(const EmbeddingMatrix& real, const EmbeddingMatrix& fake,
                       const PrdcConfig& cfg,
                       const Executor& exec = Executor()) {
  using namespace prdc_internal;
  cfg.Validate();
  if (real.dim() != fake.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(real.dim()) + " vs " +
                    std::to_string(fake.dim()));
  }
  for (const auto* set : {&real, &fake}) {
    if (set->rows() < cfg.k + 1) {
      throw Error(ErrorCode::kTooFewPoints,
                  std::string(set == &real ? "real" : "fake") +
                      " set needs at least k+1 = " + std::to_string(cfg.k + 1) +
                      " points, got " + std::to_string(set->rows()));
    }
  }
  const RowMatrixD r = Widen(real);
  const RowMatrixD f = Widen(fake);
  const std::vector<double> real_radii = KnnRadii(r, cfg.k, exec);
  const std::vector<double> fake_radii = KnnRadii(f, cfg.k, exec);

  const std::size_t n_real = real.rows();
  const std::size_t n_fake = fake.rows();
  const std::size_t d = real.dim();
  // Integer tallies; their totals do not depend on evaluation order.
  std::vector<std::atomic<std::uint32_t>> fake_hits(n_fake);
  std::vector<unsigned char> covered(n_real, 0);
  std::vector<unsigned char> recalled(n_real, 0);
  exec.ForEach(NumBlocks(n_real, kBlockRows), [&](std::size_t block) {
    const BlockRange range = Block(block, n_real, kBlockRows);
    std::vector<std::uint32_t> local_hits(n_fake, 0);
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const double* ri = r.row(static_cast<Eigen::Index>(i)).data();
      for (std::size_t j = 0; j < n_fake; ++j) {
        const double dist =
            Distance(ri, f.row(static_cast<Eigen::Index>(j)).data(), d);
        if (dist <= real_radii[i]) {
          ++local_hits[j];
          covered[i] = 1;
        }
        if (dist <= fake_radii[j]) recalled[i] = 1;
      }
    }
    for (std::size_t j = 0; j < n_fake; ++j) {
      if (local_hits[j] != 0) {
        fake_hits[j].fetch_add(local_hits[j], std::memory_order_relaxed);
      }
    }
  });

  std::uint64_t precise = 0, total_hits = 0, covered_count = 0,
                recalled_count = 0;
  for (const auto& hits : fake_hits) {
    const std::uint32_t h = hits.load(std::memory_order_relaxed);
    total_hits += h;
    precise += h > 0 ? 1 : 0;
  }
  for (std::size_t i = 0; i < n_real; ++i) {
    covered_count += covered[i];
    recalled_count += recalled[i];
  }
  PrdcResult out;
  out.precision = static_cast<double>(precise) / static_cast<double>(n_fake);
  out.recall =
      static_cast<double>(recalled_count) / static_cast<double>(n_real);
  out.density = static_cast<double>(total_hits) /
                (static_cast<double>(cfg.k) * static_cast<double>(n_fake));
  out.coverage =
      static_cast<double>(covered_count) / static_cast<double>(n_real);
  return out;
}

}  // namespace genmetrics
