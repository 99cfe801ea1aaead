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

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "genmetrics/csv.hpp"
#include "genmetrics/error.hpp"

namespace genmetrics {

inline constexpr std::size_t kNumLabels = 14;

// Condition names in the fixed reporting order.
inline constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "Atelectasis",      "Cardiomegaly",     "Consolidation",
    "Edema",            "Enlarged Cardiomediastinum",
    "Fracture",         "Lung Lesion",      "Lung Opacity",
    "No Finding",       "Pleural Effusion", "Pleural Other",
    "Pneumonia",        "Pneumothorax",     "Support Devices",
};

// Short codes used in report headers, same order as kLabelNames.
inline constexpr std::array<std::string_view, kNumLabels> kLabelCodes = {
    "AT", "CM", "CD", "ED", "EC", "Frac.", "LL",
    "LO", "NF", "PE", "PO", "PN", "PT",    "SD",
};

enum class Split { kTrain, kTest, kSynthetic };

constexpr std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kSynthetic: return "synthetic";
  }
  return "";
}

using LabelSet = std::bitset<kNumLabels>;

struct SampleRecord {
  std::string sample_id;
  std::string image_path;
  Split split = Split::kTrain;
  LabelSet labels;
  std::string prompt_id;
  std::optional<std::string> prompt_text;
  std::optional<std::int64_t> seed;
  std::optional<std::string> model_id;
};

struct SampleManifest {
  std::vector<SampleRecord> records;
  std::vector<std::string> label_names{kLabelNames.begin(), kLabelNames.end()};

  std::size_t size() const { return records.size(); }
};

namespace manifest_internal {

inline Split ParseSplit(std::string_view text, const std::string& where) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  if (text == "synthetic") return Split::kSynthetic;
  throw Error(ErrorCode::kBadValue,
              "split must be train, test or synthetic, got '" +
                  std::string(text) + "'",
              where);
}

}  // namespace manifest_internal

inline SampleManifest ParseManifest(const CsvTable& csv) {
  const std::size_t id_col = csv.RequireColumn("sample_id");
  const std::size_t path_col = csv.RequireColumn("image_path");
  const std::size_t split_col = csv.RequireColumn("split");
  const std::size_t prompt_col = csv.RequireColumn("prompt_id");
  std::array<std::size_t, kNumLabels> label_cols{};
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    label_cols[l] = csv.RequireColumn(kLabelNames[l]);
  }
  const auto seed_col = csv.FindColumn("seed");
  const auto model_col = csv.FindColumn("model_id");
  const auto text_col = csv.FindColumn("prompt_text");

  SampleManifest manifest;
  manifest.records.reserve(csv.rows.size());
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::string where = csv.Where(r);
    SampleRecord record;
    record.sample_id = row[id_col];
    if (record.sample_id.empty()) {
      throw Error(ErrorCode::kBadValue, "empty sample_id", where);
    }
    if (!seen.insert(record.sample_id).second) {
      throw Error(ErrorCode::kDuplicateSampleId, record.sample_id, where);
    }
    record.image_path = row[path_col];
    record.split = manifest_internal::ParseSplit(row[split_col], where);
    record.prompt_id = row[prompt_col];
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      const std::string& cell = row[label_cols[l]];
      if (cell == "1") {
        record.labels.set(l);
      } else if (cell != "0") {
        throw Error(ErrorCode::kBadLabelValue,
                    std::string(kLabelNames[l]) + " = '" + cell + "'", where);
      }
    }
    if (seed_col && !row[*seed_col].empty()) {
      record.seed = ParseInt(row[*seed_col], where);
    }
    if (model_col && !row[*model_col].empty()) record.model_id = row[*model_col];
    if (text_col && !row[*text_col].empty()) record.prompt_text = row[*text_col];
    manifest.records.push_back(std::move(record));
  }
  return manifest;
}

inline SampleManifest ReadManifest(const std::string& path) {
  return ParseManifest(ReadCsv(path));
}

// Column order written by WriteManifestCsv; ParseManifest accepts any order.
inline std::string ManifestToCsv(const SampleManifest& manifest) {
  std::string out = "sample_id,image_path,split,prompt_id";
  for (auto name : kLabelNames) {
    out += ',';
    out += name;
  }
  out += ",seed,model_id,prompt_text\n";
  for (const auto& r : manifest.records) {
    out += CsvEscape(r.sample_id) + ',' + CsvEscape(r.image_path) + ',' +
           std::string(SplitName(r.split)) + ',' + CsvEscape(r.prompt_id);
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      out += r.labels.test(l) ? ",1" : ",0";
    }
    out += ',';
    if (r.seed) out += std::to_string(*r.seed);
    out += ',';
    if (r.model_id) out += CsvEscape(*r.model_id);
    out += ',';
    if (r.prompt_text) out += CsvEscape(*r.prompt_text);
    out += '\n';
  }
  return out;
}

}  // namespace genmetrics
