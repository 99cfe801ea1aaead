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
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "genmetrics/csv.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/summation.hpp"

namespace genmetrics {

enum class Direction { kLowerBetter, kHigherBetter };

inline Direction ParseDirection(std::string_view text) {
  if (text == "lower_better" || text == "lower") return Direction::kLowerBetter;
  if (text == "higher_better" || text == "higher") {
    return Direction::kHigherBetter;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "direction must be lower_better or higher_better, got '" +
                  std::string(text) + "'");
}

constexpr std::string_view DirectionName(Direction d) {
  return d == Direction::kLowerBetter ? "lower_better" : "higher_better";
}

// Model x metric values. values[m][k] is model m on metric k.
struct MetricTable {
  std::string key_name = "model_id";
  std::vector<std::string> model_ids;
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> values;
  std::vector<Direction> directions;

  std::size_t num_models() const { return model_ids.size(); }
  std::size_t num_metrics() const { return metric_names.size(); }

  std::optional<std::size_t> FindMetric(std::string_view name) const {
    for (std::size_t k = 0; k < metric_names.size(); ++k) {
      if (metric_names[k] == name) return k;
    }
    return std::nullopt;
  }

  std::size_t RequireMetric(std::string_view name) const {
    if (auto k = FindMetric(name)) return *k;
    throw Error(ErrorCode::kMissingColumn, std::string(name));
  }

  std::vector<double> Column(std::size_t k) const {
    std::vector<double> out(values.size());
    for (std::size_t m = 0; m < values.size(); ++m) out[m] = values[m][k];
    return out;
  }

  void Validate() const {
    if (model_ids.empty() || metric_names.empty()) {
      throw Error(ErrorCode::kEmptyTable, "metric table has no rows or columns");
    }
    if (values.size() != model_ids.size() ||
        directions.size() != metric_names.size()) {
      throw Error(ErrorCode::kShapeMismatch, "metric table is inconsistent");
    }
    for (const auto& row : values) {
      if (row.size() != metric_names.size()) {
        throw Error(ErrorCode::kShapeMismatch, "ragged metric table row");
      }
    }
  }
};

// First column is the row key; every other column is a metric whose
// direction must appear in `directions` (or `fallback`, when given).
inline MetricTable ParseMetricTable(
    const CsvTable& csv, const std::map<std::string, Direction>& directions,
    std::optional<Direction> fallback = std::nullopt) {
  if (csv.header.size() < 2) {
    throw Error(ErrorCode::kEmptyTable, "need a key column and a metric",
                csv.source);
  }
  MetricTable t;
  t.key_name = csv.header[0];
  t.metric_names.assign(csv.header.begin() + 1, csv.header.end());
  for (const auto& name : t.metric_names) {
    auto it = directions.find(name);
    if (it != directions.end()) {
      t.directions.push_back(it->second);
    } else if (fallback) {
      t.directions.push_back(*fallback);
    } else {
      throw Error(ErrorCode::kInvalidConfig,
                  "no direction configured for metric '" + name + "'",
                  csv.source);
    }
  }
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    t.model_ids.push_back(row[0]);
    std::vector<double> values;
    for (std::size_t c = 1; c < row.size(); ++c) {
      values.push_back(ParseDouble(row[c], csv.Where(r)));
    }
    t.values.push_back(std::move(values));
  }
  t.Validate();
  return t;
}

inline MetricTable ReadMetricTable(
    const std::string& path, const std::map<std::string, Direction>& directions,
    std::optional<Direction> fallback = std::nullopt) {
  return ParseMetricTable(ReadCsv(path), directions, fallback);
}

// Rank 1 is the best value; tied values share the mean of their positions.
inline std::vector<double> RankMetric(std::span<const double> values,
                                      Direction direction) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteValue, "cannot rank NaN or Inf");
    }
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::kLowerBetter ? values[a] < values[b]
                                                : values[a] > values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) {
      ++end;
    }
    // Positions start+1 .. end share their average.
    const double shared = (static_cast<double>(start + 1) +
                           static_cast<double>(end)) / 2.0;
    for (std::size_t i = start; i < end; ++i) ranks[order[i]] = shared;
    start = end;
  }
  return ranks;
}

struct RankTable {
  std::vector<std::string> model_ids;
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> ranks;  // [model][metric]
  std::vector<double> average_rank;
  std::vector<int> normalized_rank;
};

// Dense ranking: equal values share a rank and the next value gets rank + 1.
inline std::vector<int> DenseRank(std::span<const double> values) {
  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<int>(
        std::lower_bound(distinct.begin(), distinct.end(), values[i]) -
        distinct.begin()) + 1;
  }
  return out;
}

inline RankTable AggregateRanks(const MetricTable& table) {
  table.Validate();
  RankTable out;
  out.model_ids = table.model_ids;
  out.metric_names = table.metric_names;
  out.ranks.assign(table.num_models(), std::vector<double>(table.num_metrics()));
  for (std::size_t k = 0; k < table.num_metrics(); ++k) {
    const std::vector<double> column = table.Column(k);
    const std::vector<double> ranks = RankMetric(column, table.directions[k]);
    for (std::size_t m = 0; m < table.num_models(); ++m) out.ranks[m][k] = ranks[m];
  }
  out.average_rank.resize(table.num_models());
  for (std::size_t m = 0; m < table.num_models(); ++m) {
    // Sorted so the mean does not depend on column order.
    std::vector<double> sorted = out.ranks[m];
    std::sort(sorted.begin(), sorted.end());
    out.average_rank[m] = PairwiseMean(sorted);
  }
  out.normalized_rank = DenseRank(out.average_rank);
  return out;
}

// Pearson product-moment correlation.
inline double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kLengthMismatch, "need at least 2 pairs");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kNonFiniteValue, "correlation input is not finite");
    }
  }
  const double mean_x = PairwiseMean(x);
  const double mean_y = PairwiseMean(y);
  std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy[i] = dx * dy;
    sxx[i] = dx * dx;
    syy[i] = dy * dy;
  }
  const double vx = PairwiseSum(sxx);
  const double vy = PairwiseSum(syy);
  if (vx == 0.0 || vy == 0.0) {
    throw Error(ErrorCode::kZeroVariance, "correlation of a constant vector");
  }
  return std::clamp(PairwiseSum(sxy) / std::sqrt(vx * vy), -1.0, 1.0);
}

// Pearson correlation of average-tie ranks.
inline double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  const std::vector<double> rx = RankMetric(x, Direction::kLowerBetter);
  const std::vector<double> ry = RankMetric(y, Direction::kLowerBetter);
  return Pearson(rx, ry);
}

struct BestEntry {
  std::string model_id;
  double value = 0.0;
};

// Best model on one metric; ties resolve to the first row.
inline BestEntry BestModel(const MetricTable& table, std::string_view metric) {
  table.Validate();
  const std::size_t k = table.RequireMetric(metric);
  std::size_t best = 0;
  for (std::size_t m = 1; m < table.num_models(); ++m) {
    const double v = table.values[m][k];
    const double b = table.values[best][k];
    if (table.directions[k] == Direction::kLowerBetter ? v < b : v > b) best = m;
  }
  return {table.model_ids[best], table.values[best][k]};
}

// Values of two keyed columns paired up by row key, in `a`'s row order.
inline std::pair<std::vector<double>, std::vector<double>> AlignByKey(
    const std::vector<std::string>& keys_a, std::span<const double> a,
    const std::vector<std::string>& keys_b, std::span<const double> b) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < keys_b.size(); ++i) index.emplace(keys_b[i], i);
  if (keys_a.size() != keys_b.size()) {
    throw Error(ErrorCode::kIdAlignmentError,
                "tables have " + std::to_string(keys_a.size()) + " and " +
                    std::to_string(keys_b.size()) + " rows");
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < keys_a.size(); ++i) {
    auto it = index.find(keys_a[i]);
    if (it == index.end()) {
      throw Error(ErrorCode::kIdAlignmentError,
                  "row '" + keys_a[i] + "' missing from second table");
    }
    out.first.push_back(a[i]);
    out.second.push_back(b[it->second]);
  }
  return out;
}

// Plain mean of per-sample image-text alignment scores (column
// "alignment_score", one row per sample).
inline double MeanAlignment(const CsvTable& csv) {
  const std::size_t col = csv.RequireColumn("alignment_score");
  if (csv.rows.empty()) throw Error(ErrorCode::kEmptyInput, "no scores", csv.source);
  std::vector<double> scores;
  scores.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double s = ParseDouble(csv.rows[r][col], csv.Where(r));
    if (!(s >= -1.0 && s <= 1.0)) {
      throw Error(ErrorCode::kBadValue, "alignment score outside [-1, 1]",
                  csv.Where(r));
    }
    scores.push_back(s);
  }
  return PairwiseMean(scores);
}

}  // namespace genmetrics
