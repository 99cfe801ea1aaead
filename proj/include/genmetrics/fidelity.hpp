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

#include "genmetrics/embeddings.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/gaussian.hpp"
#include "genmetrics/kid.hpp"
#include "genmetrics/parallel.hpp"

namespace genmetrics {

struct FidelityResult {
  double fid = 0.0;
  double kid_mean = 0.0;
  double kid_std = 0.0;
  double regularization_real = 0.0;
  double regularization_fake = 0.0;
};

// FID on regularized Gaussian fits plus subset KID.
inline FidelityResult ComputeFidelity(const EmbeddingMatrix& real,
                                      const EmbeddingMatrix& fake,
                                      const KidConfig& kid,
                                      const Executor& exec = Executor()) {
  if (real.dim() != fake.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(real.dim()) + " vs " + std::to_string(fake.dim()));
  }
  const GaussianStats a = FitGaussianAuto(real, exec);
  const GaussianStats b = FitGaussianAuto(fake, exec);
  FidelityResult out;
  out.fid = FrechetDistance(a, b);
  const KidResult k = Kid(real, fake, kid, exec);
  out.kid_mean = k.mean;
  out.kid_std = k.std;
  out.regularization_real = a.regularization_epsilon;
  out.regularization_fake = b.regularization_epsilon;
  return out;
}

}  // namespace genmetrics
