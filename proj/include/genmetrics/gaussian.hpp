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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/parallel.hpp"
#include "genmetrics/summation.hpp"

namespace genmetrics {

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::size_t n = 0;
  double regularization_epsilon = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

namespace gaussian_internal {

// Rows per Gram-matrix chunk and chunks per parallel wave. Both are fixed so
// the reduction tree depends on n alone.
inline constexpr std::size_t kChunkRows = 1024;
inline constexpr std::size_t kWave = 8;

inline double Trace(const Eigen::MatrixXd& m) {
  Eigen::VectorXd diag = m.diagonal();
  return PairwiseSum({diag.data(), static_cast<std::size_t>(diag.size())});
}

// Sums matrices along a binary-counter tree: equal-level partial sums are
// merged as soon as they exist, giving pairwise summation with O(log n)
// live matrices.
class TreeAccumulator {
 public:
  void Push(Eigen::MatrixXd m) {
    std::size_t level = 0;
    while (!stack_.empty() && stack_.back().first == level) {
      m = stack_.back().second + m;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(level, std::move(m));
  }

  Eigen::MatrixXd Finish() {
    Eigen::MatrixXd total = std::move(stack_.back().second);
    stack_.pop_back();
    while (!stack_.empty()) {
      total = stack_.back().second + total;
      stack_.pop_back();
    }
    return total;
  }

 private:
  std::vector<std::pair<std::size_t, Eigen::MatrixXd>> stack_;
};

inline double MinEigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace gaussian_internal

// Column means and unbiased (n - 1) covariance plus epsilon * I, in double.
inline GaussianStats FitGaussian(const Eigen::MatrixXd& x, double epsilon,
                                 const Executor& exec = Executor()) {
  using namespace gaussian_internal;
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  if (n < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "need at least 2 samples, got " + std::to_string(n));
  }
  if (!x.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "features contain NaN or Inf");
  }

  GaussianStats stats;
  stats.n = n;
  stats.mean.resize(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const double* column = x.col(static_cast<Eigen::Index>(j)).data();
    stats.mean[static_cast<Eigen::Index>(j)] = PairwiseMean({column, n});
  }

  const Eigen::RowVectorXd mean_row = stats.mean.transpose();
  const std::size_t chunks = NumBlocks(n, kChunkRows);
  TreeAccumulator gram;
  for (std::size_t wave = 0; wave < chunks; wave += kWave) {
    const std::size_t in_wave = std::min(kWave, chunks - wave);
    std::vector<Eigen::MatrixXd> partial(in_wave);
    exec.ForEach(in_wave, [&](std::size_t t) {
      const BlockRange range = Block(wave + t, n, kChunkRows);
      const auto rows = static_cast<Eigen::Index>(range.end - range.begin);
      Eigen::MatrixXd centered =
          x.middleRows(static_cast<Eigen::Index>(range.begin), rows).rowwise() -
          mean_row;
      partial[t].noalias() = centered.transpose() * centered;
    });
    for (auto& m : partial) gram.Push(std::move(m));
  }
  Eigen::MatrixXd cov = gram.Finish() / static_cast<double>(n - 1);
  stats.covariance = (cov + cov.transpose()) * 0.5;
  if (epsilon != 0.0) {
    stats.covariance.diagonal().array() += epsilon;
    stats.regularization_epsilon = epsilon;
  }
  return stats;
}

inline GaussianStats FitGaussian(const EmbeddingMatrix& m, double epsilon,
                                 const Executor& exec = Executor()) {
  return FitGaussian(m.ToDouble(), epsilon, exec);
}

// Adds 1e-6 * mean(diag) to the diagonal when the smallest eigenvalue is
// below 1e-10 * trace. Rank-deficient fits (n <= d) always trigger it.
inline void RegularizeIfSingular(GaussianStats& stats) {
  using namespace gaussian_internal;
  const double trace = Trace(stats.covariance);
  if (MinEigenvalue(stats.covariance) >= 1e-10 * trace) return;
  const double epsilon = 1e-6 * trace / static_cast<double>(stats.dim());
  stats.covariance.diagonal().array() += epsilon;
  stats.regularization_epsilon += epsilon;
}

inline GaussianStats FitGaussianAuto(const EmbeddingMatrix& m,
                                     const Executor& exec = Executor()) {
  GaussianStats stats = FitGaussian(m, 0.0, exec);
  RegularizeIfSingular(stats);
  return stats;
}

namespace gaussian_internal {

// Eigenvalues of a PSD matrix with round-off negatives clamped to zero.
inline Eigen::VectorXd ClampedSpectrum(const Eigen::VectorXd& eigenvalues,
                                       double trace, const char* what) {
  const double tolerance = 1e-8 * std::max(trace, 0.0);
  Eigen::VectorXd out = eigenvalues;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < -tolerance) {
      throw Error(ErrorCode::kSqrtFailure,
                  std::string(what) + " has eigenvalue " +
                      std::to_string(out[i]) + " below -1e-8 * trace");
    }
    out[i] = std::max(out[i], 0.0);
  }
  return out;
}

}  // namespace gaussian_internal

// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}). The trace of the
// product root equals tr((S_a^{1/2} S_b S_a^{1/2})^{1/2}), which only needs
// symmetric eigendecompositions.
inline double FrechetDistance(const GaussianStats& a, const GaussianStats& b) {
  using namespace gaussian_internal;
  if (a.dim() != b.dim() ||
      a.covariance.rows() != b.covariance.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  const double trace_a = Trace(a.covariance);
  const double trace_b = Trace(b.covariance);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_a(a.covariance);
  const Eigen::VectorXd roots_a =
      ClampedSpectrum(eig_a.eigenvalues(), trace_a, "covariance")
          .cwiseSqrt();
  const Eigen::MatrixXd& v = eig_a.eigenvectors();
  const Eigen::MatrixXd sqrt_a = v * roots_a.asDiagonal() * v.transpose();

  Eigen::MatrixXd inner = sqrt_a * b.covariance * sqrt_a;
  inner = (inner + inner.transpose()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_inner(
      inner, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd spectrum = ClampedSpectrum(
      eig_inner.eigenvalues(), Trace(inner), "covariance product");
  std::vector<double> roots(static_cast<std::size_t>(spectrum.size()));
  for (std::size_t i = 0; i < roots.size(); ++i) {
    roots[i] = std::sqrt(spectrum[static_cast<Eigen::Index>(i)]);
  }
  const double trace_product_root = PairwiseSum(roots);

  const Eigen::VectorXd diff = a.mean - b.mean;
  std::vector<double> squares(static_cast<std::size_t>(diff.size()));
  for (std::size_t i = 0; i < squares.size(); ++i) {
    const double delta = diff[static_cast<Eigen::Index>(i)];
    squares[i] = delta * delta;
  }
  return PairwiseSum(squares) + trace_a + trace_b - 2.0 * trace_product_root;
}

}  // namespace genmetrics
