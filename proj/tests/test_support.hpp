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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "genmetrics/embeddings.hpp"
#include "genmetrics/manifest.hpp"
#include "oracles.hpp"

namespace genmetrics::testing {

inline std::string FixturePath(const std::string& name) {
  return std::string(GENMETRICS_FIXTURE_DIR) + "/" + name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("genmetrics-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string File(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Gaussian points rounded to float so the library's float storage is exact.
inline Points RandomPoints(std::mt19937_64& rng, std::size_t n, std::size_t d,
                           double scale = 1.0, double shift = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Points p(n, std::vector<double>(d));
  for (auto& row : p) {
    for (auto& v : row) v = static_cast<float>(shift + scale * normal(rng));
  }
  return p;
}

// Small-integer coordinates: many duplicate points and tied distances.
inline Points IntegerGrid(std::mt19937_64& rng, std::size_t n, std::size_t d,
                          int max_coord) {
  std::uniform_int_distribution<int> coord(0, max_coord);
  Points p(n, std::vector<double>(d));
  for (auto& row : p) {
    for (auto& v : row) v = coord(rng);
  }
  return p;
}

inline Eigen::MatrixXd ToEigen(const Points& p) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(p.size()),
                    static_cast<Eigen::Index>(p.empty() ? 0 : p[0].size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p[i][j];
    }
  }
  return m;
}

inline EmbeddingMatrix ToEmbeddings(const Points& p,
                                    const std::string& prefix = "s") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < p.size(); ++i) ids.push_back(prefix + std::to_string(i));
  return EmbeddingMatrix::FromDouble(ToEigen(p), std::move(ids));
}

inline SampleRecord MakeRecord(const std::string& id, Split split,
                               std::initializer_list<std::size_t> labels,
                               const std::string& prompt = "p0") {
  SampleRecord r;
  r.sample_id = id;
  r.image_path = id + ".png";
  r.split = split;
  r.prompt_id = prompt;
  for (std::size_t l : labels) r.labels.set(l);
  return r;
}

}  // namespace genmetrics::testing
