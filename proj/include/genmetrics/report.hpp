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
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "genmetrics/conditional.hpp"
#include "genmetrics/csv.hpp"
#include "genmetrics/error.hpp"
#include "genmetrics/fidelity.hpp"
#include "genmetrics/leaderboard.hpp"
#include "genmetrics/prdc.hpp"
#include "genmetrics/privacy.hpp"

namespace genmetrics {

using Json = nlohmann::ordered_json;

enum class ReportFormat { kMarkdown, kCsv, kJson };

inline void WriteTextFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create file", path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed", path);
}

namespace report_internal {

inline std::string Row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

inline std::string Rule(std::size_t columns) {
  std::string out = "|---|";
  for (std::size_t i = 1; i < columns; ++i) out += "---:|";
  return out + "\n";
}

inline std::string Arrow(Direction d) {
  return d == Direction::kLowerBetter ? " ↓" : " ↑";
}

inline Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline std::string OptionalCell(const std::optional<double>& v, int decimals) {
  return v ? FormatFixed(*v, decimals) : "–";
}

inline std::string OptionalCsv(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "";
}

}  // namespace report_internal

// Markdown table in the leaderboard layout: best value per column in bold,
// runner-up underlined.
inline std::string MetricTableMarkdown(const MetricTable& t, int decimals = 3,
                                       std::string_view key_header = "Model") {
  using namespace report_internal;
  t.Validate();
  std::vector<std::string> header{std::string(key_header)};
  for (std::size_t k = 0; k < t.num_metrics(); ++k) {
    header.push_back(t.metric_names[k] + Arrow(t.directions[k]));
  }
  std::string out = Row(header) + Rule(header.size());
  std::vector<std::vector<double>> ranks(t.num_metrics());
  for (std::size_t k = 0; k < t.num_metrics(); ++k) {
    ranks[k] = RankMetric(t.Column(k), t.directions[k]);
  }
  for (std::size_t m = 0; m < t.num_models(); ++m) {
    std::vector<std::string> cells{t.model_ids[m]};
    for (std::size_t k = 0; k < t.num_metrics(); ++k) {
      const std::string text = FormatFixed(t.values[m][k], decimals);
      const std::vector<int> dense = DenseRank(ranks[k]);
      if (dense[m] == 1) {
        cells.push_back("**" + text + "**");
      } else if (dense[m] == 2) {
        cells.push_back("<u>" + text + "</u>");
      } else {
        cells.push_back(text);
      }
    }
    out += Row(cells);
  }
  return out;
}

inline std::string MetricTableCsv(const MetricTable& t) {
  t.Validate();
  std::string out = CsvEscape(t.key_name);
  for (const auto& name : t.metric_names) out += "," + CsvEscape(name);
  out += "\n";
  for (std::size_t m = 0; m < t.num_models(); ++m) {
    out += CsvEscape(t.model_ids[m]);
    for (double v : t.values[m]) out += "," + FormatDouble(v);
    out += "\n";
  }
  return out;
}

inline Json MetricTableJson(const MetricTable& t) {
  t.Validate();
  Json metrics = Json::array();
  for (std::size_t k = 0; k < t.num_metrics(); ++k) {
    metrics.push_back({{"name", t.metric_names[k]},
                       {"direction", std::string(DirectionName(t.directions[k]))}});
  }
  Json rows = Json::array();
  for (std::size_t m = 0; m < t.num_models(); ++m) {
    Json values = Json::object();
    for (std::size_t k = 0; k < t.num_metrics(); ++k) {
      values[t.metric_names[k]] = t.values[m][k];
    }
    rows.push_back({{t.key_name, t.model_ids[m]}, {"values", values}});
  }
  return {{"metrics", metrics}, {"rows", rows}};
}

inline std::string RenderMetricTable(const MetricTable& t, ReportFormat format,
                                     int decimals = 3) {
  switch (format) {
    case ReportFormat::kMarkdown: return MetricTableMarkdown(t, decimals);
    case ReportFormat::kCsv: return MetricTableCsv(t);
    case ReportFormat::kJson: return MetricTableJson(t).dump(2) + "\n";
  }
  return {};
}

inline void EmitReport(const MetricTable& t, ReportFormat format,
                       const std::string& path, int decimals = 3) {
  WriteTextFile(path, RenderMetricTable(t, format, decimals));
}

// Per-metric ranks followed by Average Rank and Normalized Rank.
inline std::string RankTableMarkdown(const RankTable& r) {
  using namespace report_internal;
  std::vector<std::string> header{"Model"};
  for (const auto& name : r.metric_names) header.push_back(name);
  header.push_back("Average Rank");
  header.push_back("Normalized Rank");
  std::string out = Row(header) + Rule(header.size());
  for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
    std::vector<std::string> cells{r.model_ids[m]};
    for (double rank : r.ranks[m]) {
      cells.push_back(rank == static_cast<int>(rank)
                          ? std::to_string(static_cast<int>(rank))
                          : FormatFixed(rank, 1));
    }
    cells.push_back(FormatFixed(r.average_rank[m], 2));
    cells.push_back(std::to_string(r.normalized_rank[m]));
    out += Row(cells);
  }
  return out;
}

inline std::string RankTableCsv(const RankTable& r) {
  std::string out = "model_id";
  for (const auto& name : r.metric_names) out += "," + CsvEscape(name);
  out += ",average_rank,normalized_rank\n";
  for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
    out += CsvEscape(r.model_ids[m]);
    for (double rank : r.ranks[m]) out += "," + FormatDouble(rank);
    out += "," + FormatDouble(r.average_rank[m]) + "," +
           std::to_string(r.normalized_rank[m]) + "\n";
  }
  return out;
}

inline Json RankTableJson(const RankTable& r) {
  Json rows = Json::array();
  for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
    Json ranks = Json::object();
    for (std::size_t k = 0; k < r.metric_names.size(); ++k) {
      ranks[r.metric_names[k]] = r.ranks[m][k];
    }
    rows.push_back({{"model_id", r.model_ids[m]},
                    {"ranks", ranks},
                    {"average_rank", r.average_rank[m]},
                    {"normalized_rank", r.normalized_rank[m]}});
  }
  return {{"metrics", r.metric_names}, {"rows", rows}};
}

inline Json FidelityJson(const FidelityResult& f) {
  return {{"fid", f.fid},
          {"kid_mean", f.kid_mean},
          {"kid_std", f.kid_std},
          {"regularization_real", f.regularization_real},
          {"regularization_fake", f.regularization_fake}};
}

inline std::string FidelityCsv(const FidelityResult& f) {
  return "fid,kid_mean,kid_std\n" + FormatDouble(f.fid) + "," +
         FormatDouble(f.kid_mean) + "," + FormatDouble(f.kid_std) + "\n";
}

inline Json PrdcJson(const PrdcResult& p) {
  return {{"precision", p.precision},
          {"recall", p.recall},
          {"density", p.density},
          {"coverage", p.coverage}};
}

inline std::string PrdcCsv(const PrdcResult& p) {
  return "precision,recall,density,coverage\n" + FormatDouble(p.precision) +
         "," + FormatDouble(p.recall) + "," + FormatDouble(p.density) + "," +
         FormatDouble(p.coverage) + "\n";
}

inline Json PrivacyJson(const PrivacySummary& s, const PrivacyConfig& cfg) {
  using report_internal::OptionalNumber;
  Json per_prompt = Json::array();
  for (const auto& p : s.per_prompt) {
    per_prompt.push_back({{"prompt_id", p.prompt_id},
                          {"max_reid", p.max_reid},
                          {"min_pixel", OptionalNumber(p.min_pixel)},
                          {"min_latent", OptionalNumber(p.min_latent)},
                          {"num_seeds", p.num_seeds}});
  }
  return {{"delta", cfg.delta},
          {"aggregation", cfg.aggregation == PrivacyAggregation::kPerPrompt
                              ? "per_prompt"
                              : "pairs"},
          {"avg_reid", s.avg_reid},
          {"avg_latent", OptionalNumber(s.avg_latent)},
          {"avg_pixel", OptionalNumber(s.avg_pixel)},
          {"max_reid", s.max_reid},
          {"count_over_delta", s.count_over_delta},
          {"num_units", s.num_units},
          {"warnings", s.warnings},
          {"per_prompt", per_prompt}};
}

inline std::string PrivacyPerPromptCsv(const PrivacySummary& s) {
  using report_internal::OptionalCsv;
  std::string out = "prompt_id,max_reid,min_pixel,min_latent,num_seeds\n";
  for (const auto& p : s.per_prompt) {
    out += CsvEscape(p.prompt_id) + "," + FormatDouble(p.max_reid) + "," +
           OptionalCsv(p.min_pixel) + "," + OptionalCsv(p.min_latent) + "," +
           std::to_string(p.num_seeds) + "\n";
  }
  return out;
}

inline std::string PrivacyMarkdown(const PrivacySummary& s,
                                   const PrivacyConfig& cfg) {
  using namespace report_internal;
  std::string out = Row({"Statistic", "Value"}) + Rule(2);
  out += Row({"Avg. Re-ID Score ↓", FormatFixed(s.avg_reid, 3)});
  out += Row({"Avg. Latent Distance ↑", OptionalCell(s.avg_latent, 3)});
  out += Row({"Avg. Pixel Distance ↑", OptionalCell(s.avg_pixel, 3)});
  out += Row({"Max. Re-ID Score ↓", FormatFixed(s.max_reid, 3)});
  out += Row({"Count Re-ID > " + FormatDouble(cfg.delta) + " ↓",
              std::to_string(s.count_over_delta)});
  return out;
}

// One row per condition: sample counts, FID/KID, then PRDC.
inline std::string ConditionalMarkdown(const ConditionalReport& r) {
  using namespace report_internal;
  std::string out =
      Row({"Condition", "Code", "n real", "n fake", "FID ↓", "KID ↓",
           "Precision ↑", "Recall ↑", "Density ↑", "Coverage ↑"}) +
      Rule(10);
  for (std::size_t l = 0; l < r.strata.size(); ++l) {
    const auto& s = r.strata[l];
    std::vector<std::string> cells{s.label_name,
                                   std::string(kLabelCodes[l]),
                                   std::to_string(s.n_real),
                                   std::to_string(s.n_fake)};
    if (s.skipped) {
      cells.push_back("skipped: " + s.skip_reason);
      cells.insert(cells.end(), 5, "–");
    } else {
      cells.push_back(OptionalCell(s.fid, 2));
      cells.push_back(OptionalCell(s.kid_mean, 3));
      if (s.prdc) {
        cells.push_back(FormatFixed(s.prdc->precision, 3));
        cells.push_back(FormatFixed(s.prdc->recall, 3));
        cells.push_back(FormatFixed(s.prdc->density, 3));
        cells.push_back(FormatFixed(s.prdc->coverage, 3));
      } else {
        cells.insert(cells.end(), 4, "–");
      }
    }
    out += Row(cells);
  }
  return out;
}

inline std::string ConditionalCsv(const ConditionalReport& r) {
  using report_internal::OptionalCsv;
  std::string out =
      "label,n_real,n_fake,skipped,skip_reason,fid,kid_mean,kid_std,precision,"
      "recall,density,coverage\n";
  for (const auto& s : r.strata) {
    out += CsvEscape(s.label_name) + "," + std::to_string(s.n_real) + "," +
           std::to_string(s.n_fake) + "," + (s.skipped ? "1" : "0") + "," +
           CsvEscape(s.skip_reason) + "," + OptionalCsv(s.fid) + "," +
           OptionalCsv(s.kid_mean) + "," + OptionalCsv(s.kid_std);
    if (s.prdc) {
      out += "," + FormatDouble(s.prdc->precision) + "," +
             FormatDouble(s.prdc->recall) + "," + FormatDouble(s.prdc->density) +
             "," + FormatDouble(s.prdc->coverage);
    } else {
      out += ",,,,";
    }
    out += "\n";
  }
  return out;
}

inline Json ConditionalJson(const ConditionalReport& r) {
  using report_internal::OptionalNumber;
  Json rows = Json::array();
  for (const auto& s : r.strata) {
    Json row = {{"label", s.label_name},
                {"n_real", s.n_real},
                {"n_fake", s.n_fake},
                {"skipped", s.skipped}};
    if (s.skipped) {
      row["reason"] = s.skip_reason;
    } else {
      row["fid"] = OptionalNumber(s.fid);
      row["kid_mean"] = OptionalNumber(s.kid_mean);
      row["kid_std"] = OptionalNumber(s.kid_std);
      row["regularization_real"] = s.regularization_real;
      row["regularization_fake"] = s.regularization_fake;
      if (s.prdc) {
        row["prdc"] = PrdcJson(*s.prdc);
      } else {
        row["prdc"] = nullptr;
        row["prdc_reason"] = s.prdc_skip_reason;
      }
    }
    rows.push_back(std::move(row));
  }
  return {{"strata", rows}};
}

}  // namespace genmetrics
