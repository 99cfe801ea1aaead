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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace genmetrics {

// Counter-based generator: output i of stream s under seed k is a pure
// function Mix(key(k, s) + i * golden). Streams are split off by id, so a new
// consumer never perturbs the draws of an existing one.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(Mix(seed ^ Mix(stream + 0x632be59bd9b4e019ULL))) {}

  CounterRng Split(std::uint64_t stream) const {
    CounterRng child(key_, stream);
    return child;
  }

  std::uint64_t Next() {
    return Mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform integer in [0, bound) without modulo bias (Lemire).
  std::uint64_t Below(std::uint64_t bound) {
    unsigned __int128 product =
        static_cast<unsigned __int128>(Next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(Next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t Mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Draws `count` distinct indices from [0, population) via a partial
// Fisher-Yates shuffle; the result is in draw order.
inline std::vector<std::size_t> SampleWithoutReplacement(
    std::size_t population, std::size_t count, CounterRng& rng) {
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace genmetrics
