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
#include <span>

namespace genmetrics {

// Pairwise (tree) summation. The split points depend only on the length of
// the input, so the result is bit-identical for a given sequence no matter
// which thread produced the terms.
inline double PairwiseSum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  }
  const std::size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

inline double PairwiseMean(std::span<const double> values) {
  return PairwiseSum(values) / static_cast<double>(values.size());
}

}  // namespace genmetrics
