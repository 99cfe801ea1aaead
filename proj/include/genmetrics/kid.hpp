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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/parallel.hpp"
#include "genmetrics/random.hpp"
#include "genmetrics/summation.hpp"

namespace genmetrics {

struct KidConfig {
  int kernel_degree = 3;
  std::optional<double> kernel_gamma;  // nullopt means 1 / d
  double kernel_coef = 1.0;
  std::optional<std::size_t> subset_size;  // nullopt means min(1000, n)
  std::size_t num_subsets = 100;
  std::uint64_t rng_seed = 42;

  void Validate() const {
    if (kernel_degree < 1) {
      throw Error(ErrorCode::kInvalidConfig, "kid.degree must be >= 1");
    }
    if (subset_size && *subset_size < 2) {
      throw Error(ErrorCode::kInvalidConfig, "kid.subset_size must be >= 2");
    }
    if (num_subsets < 1) {
      throw Error(ErrorCode::kInvalidConfig, "kid.num_subsets must be >= 1");
    }
  }
};

struct KidResult {
  double mean = 0.0;
  double std = 0.0;
};

// k(u, v) = (gamma * <u, v> + coef)^degree
struct PolynomialKernel {
  int degree = 3;
  double gamma = 1.0;
  double coef = 1.0;

  double FromDot(double dot) const {
    const double base = gamma * dot + coef;
    double out = 1.0;
    for (int i = 0; i < degree; ++i) out *= base;
    return out;
  }
};

namespace kid_internal {

// Sum of the kernel over all (i, j), optionally skipping i == j. Each row is
// summed pairwise, then the row totals are.
inline double KernelSum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const PolynomialKernel& kernel, bool skip_diagonal) {
  const Eigen::MatrixXd dots = a * b.transpose();
  const auto rows = static_cast<std::size_t>(dots.rows());
  const auto cols = static_cast<std::size_t>(dots.cols());
  std::vector<double> row_totals(rows);
  std::vector<double> terms;
  terms.reserve(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    terms.clear();
    for (std::size_t j = 0; j < cols; ++j) {
      if (skip_diagonal && i == j) continue;
      terms.push_back(kernel.FromDot(
          dots(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    row_totals[i] = PairwiseSum(terms);
  }
  return PairwiseSum(row_totals);
}

inline Eigen::MatrixXd GatherRows(const EmbeddingMatrix& m,
                                  std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(m.dim()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) =
        m.values().row(static_cast<Eigen::Index>(rows[r])).cast<double>();
  }
  return out;
}

}  // namespace kid_internal

// Unbiased MMD^2 between two equally sized samples (rows of x and y).
inline double UnbiasedMmd2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           const PolynomialKernel& kernel) {
  using kid_internal::KernelSum;
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dimensions differ");
  }
  if (x.rows() != y.rows() || x.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "need two equally sized samples of at least 2 rows");
  }
  const double m = static_cast<double>(x.rows());
  const double xx = KernelSum(x, x, kernel, true) / (m * (m - 1.0));
  const double yy = KernelSum(y, y, kernel, true) / (m * (m - 1.0));
  const double xy = KernelSum(x, y, kernel, false) / (m * m);
  return xx + yy - 2.0 * xy;
}

// Mean and population standard deviation of UnbiasedMmd2 over random subsets.
// Subset s draws its x rows from stream 2s and its y rows from stream 2s+1 of
// cfg.rng_seed; drawn indices are sorted, so a full-size draw is the input in
// its original order.
inline KidResult Kid(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                     const KidConfig& cfg, const Executor& exec = Executor()) {
  cfg.Validate();
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  }
  const std::size_t available = std::min(x.rows(), y.rows());
  const std::size_t m =
      cfg.subset_size.value_or(std::min<std::size_t>(1000, available));
  if (m > available) {
    throw Error(ErrorCode::kSubsetTooLarge,
                "subset size " + std::to_string(m) + " exceeds " +
                    std::to_string(available) + " samples");
  }
  if (m < 2) {
    throw Error(ErrorCode::kTooFewSamples, "KID needs at least 2 samples");
  }
  const PolynomialKernel kernel{
      cfg.kernel_degree,
      cfg.kernel_gamma.value_or(1.0 / static_cast<double>(x.dim())),
      cfg.kernel_coef};

  const CounterRng root(cfg.rng_seed, 0);
  std::vector<double> estimates(cfg.num_subsets);
  exec.ForEach(cfg.num_subsets, [&](std::size_t s) {
    CounterRng x_stream = root.Split(2 * s);
    CounterRng y_stream = root.Split(2 * s + 1);
    auto x_rows = SampleWithoutReplacement(x.rows(), m, x_stream);
    auto y_rows = SampleWithoutReplacement(y.rows(), m, y_stream);
    std::sort(x_rows.begin(), x_rows.end());
    std::sort(y_rows.begin(), y_rows.end());
    estimates[s] = UnbiasedMmd2(kid_internal::GatherRows(x, x_rows),
                                kid_internal::GatherRows(y, y_rows), kernel);
  });

  KidResult result;
  result.mean = PairwiseMean(estimates);
  std::vector<double> deviations(estimates.size());
  for (std::size_t s = 0; s < estimates.size(); ++s) {
    const double delta = estimates[s] - result.mean;
    deviations[s] = delta * delta;
  }
  result.std = std::sqrt(PairwiseMean(deviations));
  return result;
}

}  // namespace genmetrics
