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
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "genmetrics/error.hpp"
#include "genmetrics/fidelity.hpp"
#include "genmetrics/gaussian.hpp"
#include "genmetrics/kid.hpp"
#include "genmetrics/parallel.hpp"
#include "test_support.hpp"

namespace genmetrics {
namespace {

using testing::Points;
using testing::RandomPoints;
using testing::ToEigen;
using testing::ToEmbeddings;

GaussianStats Stats(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  GaussianStats s;
  s.mean = std::move(mean);
  s.covariance = std::move(cov);
  s.n = 100;
  return s;
}

TEST(FitGaussian, SquareCorners) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 2, 0, 0, 2, 2, 2;
  const GaussianStats s = FitGaussian(x, 0.0);
  EXPECT_DOUBLE_EQ(s.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(1), 1.0);
  EXPECT_DOUBLE_EQ(s.covariance(0, 0), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.covariance(1, 1), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.covariance(0, 1), 0.0);
  EXPECT_EQ(s.n, 4u);
}

TEST(FitGaussian, Errors) {
  Eigen::MatrixXd one(1, 3);
  one.setOnes();
  EXPECT_THROW(FitGaussian(one, 0.0), Error);
  try {
    FitGaussian(one, 0.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewSamples);
  }
  Eigen::MatrixXd nan(2, 1);
  nan << 1.0, std::nan("");
  try {
    FitGaussian(nan, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteInput);
  }
}

TEST(FitGaussian, SymmetricAndThreadIndependent) {
  std::mt19937_64 rng(5);
  // Enough rows to span several chunks and waves.
  const Eigen::MatrixXd x = ToEigen(RandomPoints(rng, 9000, 7));
  const GaussianStats a = FitGaussian(x, 0.0, Executor(1));
  const GaussianStats b = FitGaussian(x, 0.0, Executor(8));
  EXPECT_TRUE(a.covariance == a.covariance.transpose());
  EXPECT_TRUE(a.covariance == b.covariance);
  EXPECT_TRUE(a.mean == b.mean);
  // Two-pass textbook estimate as a loose cross-check.
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mu;
  const Eigen::MatrixXd cov = centered.transpose() * centered / 8999.0;
  EXPECT_LT((cov - a.covariance).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitGaussian, EpsilonAndAutoRegularization) {
  Eigen::MatrixXd x(3, 4);  // n <= d: rank deficient
  x << 1, 2, 3, 4, 2, 1, 0, 1, 5, 5, 5, 5;
  const GaussianStats fixed = FitGaussian(x, 0.5);
  const GaussianStats plain = FitGaussian(x, 0.0);
  EXPECT_DOUBLE_EQ(fixed.covariance(2, 2), plain.covariance(2, 2) + 0.5);
  EXPECT_EQ(fixed.regularization_epsilon, 0.5);

  GaussianStats reg = plain;
  RegularizeIfSingular(reg);
  const double expected = 1e-6 * plain.covariance.trace() / 4.0;
  EXPECT_NEAR(reg.regularization_epsilon, expected, 1e-18);
  EXPECT_GT(reg.regularization_epsilon, 0.0);

  Eigen::MatrixXd id(2, 2);
  id << 1, 0, 0, 1;
  GaussianStats full = Stats(Eigen::Vector2d(0, 0), id);
  RegularizeIfSingular(full);
  EXPECT_EQ(full.regularization_epsilon, 0.0);
}

TEST(Frechet, AnalyticCases) {
  Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  const GaussianStats a = Stats(Eigen::Vector2d(0, 0), i2);
  EXPECT_NEAR(FrechetDistance(a, a), 0.0, 1e-8);

  Eigen::VectorXd m0(1), m1(1);
  m0 << 0;
  m1 << 1;
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  EXPECT_NEAR(FrechetDistance(Stats(m0, one), Stats(m1, one)), 1.0, 1e-8);

  const GaussianStats b = Stats(Eigen::Vector2d(3, 0), 4.0 * i2);
  EXPECT_NEAR(FrechetDistance(a, b), 11.0, 1e-8);
}

TEST(Frechet, CommutingClosedForm) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 5.0), m(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 9;
    // Shared random eigenbasis, independent spectra.
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(d, d))
            .householderQ();
    std::vector<double> mu_a(d), mu_b(d), va(d), vb(d);
    Eigen::VectorXd ma(d), mb(d), la(d), lb(d);
    for (int i = 0; i < d; ++i) {
      ma(i) = mu_a[i] = m(rng);
      mb(i) = mu_b[i] = m(rng);
      la(i) = va[i] = u(rng);
      lb(i) = vb[i] = u(rng);
    }
    const GaussianStats a = Stats(ma, q * la.asDiagonal() * q.transpose());
    const GaussianStats b = Stats(mb, q * lb.asDiagonal() * q.transpose());
    // The mean term is rotation-free; compare against the rotated-frame form.
    std::vector<double> rot_a(d), rot_b(d);
    const Eigen::VectorXd qa = q.transpose() * ma, qb = q.transpose() * mb;
    for (int i = 0; i < d; ++i) {
      rot_a[i] = qa(i);
      rot_b[i] = qb(i);
    }
    const double expected = testing::DiagonalFid(rot_a, va, rot_b, vb);
    EXPECT_NEAR(FrechetDistance(a, b), expected, 1e-8 * std::max(1.0, expected));
  }
}

TEST(Frechet, SymmetricAndTranslationInvariant) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Points x = RandomPoints(rng, 200, 6, 1.0, 0.0);
    const Points y = RandomPoints(rng, 150, 6, 2.0, 0.5);
    const GaussianStats a = FitGaussian(ToEigen(x), 0.0);
    const GaussianStats b = FitGaussian(ToEigen(y), 0.0);
    const double ab = FrechetDistance(a, b);
    const double ba = FrechetDistance(b, a);
    EXPECT_LT(std::abs(ab - ba), 1e-9 * ab);

    Eigen::MatrixXd xs = ToEigen(x), ys = ToEigen(y);
    const Eigen::RowVectorXd t = Eigen::RowVectorXd::Constant(6, 3.0);
    xs.rowwise() += t;
    ys.rowwise() += t;
    const double shifted =
        FrechetDistance(FitGaussian(xs, 0.0), FitGaussian(ys, 0.0));
    EXPECT_NEAR(shifted, ab, 1e-8);
  }
}

TEST(Frechet, RowPermutationInvariant) {
  std::mt19937_64 rng(29);
  Points x = RandomPoints(rng, 120, 4);
  const Points y = RandomPoints(rng, 120, 4, 1.5);
  const double base = FrechetDistance(FitGaussian(ToEigen(x), 0.0),
                                      FitGaussian(ToEigen(y), 0.0));
  std::shuffle(x.begin(), x.end(), rng);
  const double permuted = FrechetDistance(FitGaussian(ToEigen(x), 0.0),
                                          FitGaussian(ToEigen(y), 0.0));
  EXPECT_NEAR(permuted, base, 1e-10 * base);
}

TEST(Frechet, MonteCarloNearAnalytic) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(5000, 2), y(5000, 2);
  for (int i = 0; i < 5000; ++i) {
    x(i, 0) = n(rng);
    x(i, 1) = n(rng);
    y(i, 0) = 3.0 + 2.0 * n(rng);
    y(i, 1) = 2.0 * n(rng);
  }
  const double fid = FrechetDistance(FitGaussian(x, 0.0), FitGaussian(y, 0.0));
  EXPECT_NEAR(fid, 11.0, 0.5);
}

TEST(Frechet, ErrorPaths) {
  const GaussianStats a = Stats(Eigen::Vector2d(0, 0), Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd m(3);
  m.setZero();
  const GaussianStats b = Stats(m, Eigen::MatrixXd::Identity(3, 3));
  try {
    FrechetDistance(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  try {
    FrechetDistance(Stats(Eigen::Vector2d(0, 0), indefinite), a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSqrtFailure);
    EXPECT_EQ(e.category(), ErrorCategory::kNumerical);
  }
}

TEST(Frechet, RankDeficientFitsStayFinite) {
  std::mt19937_64 rng(31);
  const EmbeddingMatrix x = ToEmbeddings(RandomPoints(rng, 5, 16));
  const EmbeddingMatrix y = ToEmbeddings(RandomPoints(rng, 6, 16, 1.0, 1.0));
  const GaussianStats a = FitGaussianAuto(x);
  const GaussianStats b = FitGaussianAuto(y);
  EXPECT_GT(a.regularization_epsilon, 0.0);
  const double fid = FrechetDistance(a, b);
  EXPECT_TRUE(std::isfinite(fid));
  EXPECT_GT(fid, 0.0);
}

KidConfig SingleSubset(std::size_t m, double gamma = 1.0) {
  KidConfig cfg;
  cfg.kernel_degree = 3;
  cfg.kernel_gamma = gamma;
  cfg.kernel_coef = 1.0;
  cfg.subset_size = m;
  cfg.num_subsets = 1;
  return cfg;
}

TEST(Kid, HandCase) {
  const Points x{{0.0}, {1.0}};
  const KidResult r = Kid(ToEmbeddings(x), ToEmbeddings(x), SingleSubset(2));
  EXPECT_EQ(r.mean, -3.5);
  EXPECT_EQ(r.std, 0.0);
}

TEST(Kid, ConstantRowsGiveZeroExactly) {
  // 0.5 * 4 * 0.25 + 1 = 1.5 is exact, so every kernel value is identical.
  const Points x(10, std::vector<double>{0.5, 0.5, 0.5, 0.5});
  KidConfig cfg = SingleSubset(10, 0.25);
  cfg.num_subsets = 5;
  const KidResult r = Kid(ToEmbeddings(x), ToEmbeddings(x, "y"), cfg);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.std, 0.0);
}

TEST(Kid, MatchesBruteForceOracle) {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> size(2, 50), dim(1, 12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = size(rng);
    const std::size_t d = dim(rng);
    const Points x = RandomPoints(rng, m, d);
    const Points y = RandomPoints(rng, m, d, 1.3, 0.2);
    const double gamma = 1.0 / static_cast<double>(d);
    const double expected = testing::BruteKid(x, y, 3, gamma, 1.0);
    const KidResult r = Kid(ToEmbeddings(x), ToEmbeddings(y), SingleSubset(m, gamma));
    EXPECT_LE(std::abs(r.mean - expected), 1e-10 * std::abs(expected))
        << "trial " << trial;
  }
}

TEST(Kid, SameDistributionConcentratesNearZero) {
  std::mt19937_64 rng(41);
  const Points x = RandomPoints(rng, 500, 8);
  const Points y = RandomPoints(rng, 500, 8);
  KidConfig cfg;
  cfg.subset_size = 200;
  const KidResult r = Kid(ToEmbeddings(x), ToEmbeddings(y), cfg);
  EXPECT_LT(std::abs(r.mean), 0.05);
  EXPECT_GT(r.std, 0.0);
}

TEST(Kid, SymmetricGivenSameDraws) {
  std::mt19937_64 rng(43);
  const Points x = RandomPoints(rng, 30, 5);
  const Points y = RandomPoints(rng, 30, 5, 2.0);
  const KidConfig cfg = SingleSubset(30, 0.2);
  const double xy = Kid(ToEmbeddings(x), ToEmbeddings(y), cfg).mean;
  const double yx = Kid(ToEmbeddings(y), ToEmbeddings(x), cfg).mean;
  EXPECT_NEAR(xy, yx, 1e-12 * std::abs(xy));
}

TEST(Kid, DeterministicAcrossThreadsAndSeedSensitive) {
  std::mt19937_64 rng(47);
  const EmbeddingMatrix x = ToEmbeddings(RandomPoints(rng, 300, 6));
  const EmbeddingMatrix y = ToEmbeddings(RandomPoints(rng, 280, 6, 1.1));
  KidConfig cfg;
  cfg.subset_size = 100;
  cfg.num_subsets = 40;
  const KidResult one = Kid(x, y, cfg, Executor(1));
  const KidResult eight = Kid(x, y, cfg, Executor(8));
  EXPECT_EQ(one.mean, eight.mean);
  EXPECT_EQ(one.std, eight.std);
  cfg.rng_seed = 43;
  EXPECT_NE(Kid(x, y, cfg).mean, one.mean);
}

TEST(Kid, DefaultsAndErrors) {
  std::mt19937_64 rng(53);
  const EmbeddingMatrix x = ToEmbeddings(RandomPoints(rng, 20, 3));
  const EmbeddingMatrix y = ToEmbeddings(RandomPoints(rng, 10, 3));
  const EmbeddingMatrix z = ToEmbeddings(RandomPoints(rng, 10, 4));
  KidConfig cfg;
  EXPECT_NO_THROW(Kid(x, y, cfg));  // subset size defaults to min(1000, 10)
  cfg.subset_size = 11;
  try {
    Kid(x, y, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSubsetTooLarge);
  }
  try {
    Kid(y, z, KidConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  KidConfig bad;
  bad.num_subsets = 0;
  try {
    bad.Validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kConfig);
  }
}

TEST(Fidelity, CombinesFidAndKid) {
  std::mt19937_64 rng(59);
  const EmbeddingMatrix x = ToEmbeddings(RandomPoints(rng, 400, 4));
  const EmbeddingMatrix y = ToEmbeddings(RandomPoints(rng, 400, 4, 1.0, 2.0));
  KidConfig cfg;
  cfg.subset_size = 100;
  cfg.num_subsets = 10;
  const FidelityResult f = ComputeFidelity(x, y, cfg);
  EXPECT_EQ(f.fid, FrechetDistance(FitGaussian(x, 0.0), FitGaussian(y, 0.0)));
  // The mean term alone is a lower bound; a shift of 2 in 4 dimensions is 16.
  const Eigen::VectorXd shift = x.ToDouble().colwise().mean() - y.ToDouble().colwise().mean();
  EXPECT_GE(f.fid, shift.squaredNorm() - 1e-9);
  EXPECT_NEAR(shift.squaredNorm(), 16.0, 3.0);
  EXPECT_GT(f.kid_mean, 0.0);
  EXPECT_EQ(f.regularization_real, 0.0);
}

}  // namespace
}  // namespace genmetrics
