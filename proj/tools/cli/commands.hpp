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
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/run_record.hpp"
#include "genmetrics/genmetrics.hpp"

namespace genmetrics::cli {

// Shared state for one subcommand run: resolved config, worker pool, the
// input log for the run record and the list of files written.
class RunContext {
 public:
  RunContext(const RunConfig& cfg, std::string subcommand)
      : cfg_(cfg), exec_(cfg.threads), subcommand_(std::move(subcommand)) {}

  const RunConfig& cfg() const { return cfg_; }
  const Executor& exec() const { return exec_; }
  InputLog& inputs() { return inputs_; }

  // Returns `path` after checking it was configured and logging its digest.
  const std::string& Input(const std::string& path, std::string_view what) {
    if (path.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "missing required path: " + std::string(what));
    }
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kIoFailure, "file not found", path);
    }
    inputs_.Add(path);
    return path;
  }

  void Write(const std::string& name, std::string_view content) {
    std::filesystem::create_directories(cfg_.output_dir);
    WriteTextFile((std::filesystem::path(cfg_.output_dir) / name).string(),
                  content);
    outputs_.push_back(name);
  }

  void WriteJson(const std::string& name, const nlohmann::ordered_json& j) {
    Write(name, j.dump(2) + "\n");
  }

  void Finish() {
    std::vector<std::string> outputs = outputs_;
    WriteJson("run_record.json",
              RunRecord(subcommand_, cfg_.canonical, inputs_, outputs));
  }

 private:
  const RunConfig& cfg_;
  Executor exec_;
  std::string subcommand_;
  InputLog inputs_;
  std::vector<std::string> outputs_;
};

inline void RunFidelity(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  const EmbeddingMatrix real =
      ReadEmbeddings(ctx.Input(cfg.real_embeddings, "paths.real_embeddings"));
  const EmbeddingMatrix fake =
      ReadEmbeddings(ctx.Input(cfg.fake_embeddings, "paths.fake_embeddings"));
  const FidelityResult f = ComputeFidelity(real, fake, cfg.kid, ctx.exec());
  std::optional<double> alignment;
  if (!cfg.alignment_scores.empty()) {
    alignment = MeanAlignment(
        ReadCsv(ctx.Input(cfg.alignment_scores, "paths.alignment_scores")));
  }
  Json j = FidelityJson(f);
  j["n_real"] = real.rows();
  j["n_fake"] = fake.rows();
  j["dim"] = real.dim();
  if (alignment) j["alignment"] = *alignment;
  ctx.WriteJson("fidelity.json", j);
  std::string csv = "fid,kid_mean,kid_std,alignment\n" + FormatDouble(f.fid) +
                    "," + FormatDouble(f.kid_mean) + "," +
                    FormatDouble(f.kid_std) + "," +
                    (alignment ? FormatDouble(*alignment) : "") + "\n";
  ctx.Write("fidelity.csv", csv);
}

inline void RunPrdc(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  const EmbeddingMatrix real =
      ReadEmbeddings(ctx.Input(cfg.real_embeddings, "paths.real_embeddings"));
  const EmbeddingMatrix fake =
      ReadEmbeddings(ctx.Input(cfg.fake_embeddings, "paths.fake_embeddings"));
  const PrdcResult p = Prdc(real, fake, cfg.prdc, ctx.exec());
  Json j = PrdcJson(p);
  j["k"] = cfg.prdc.k;
  ctx.WriteJson("prdc.json", j);
  ctx.Write("prdc.csv", PrdcCsv(p));
}

inline void RunPrivacy(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  std::vector<PrivacyPairRecord> records =
      ReadScoreFile(ctx.Input(cfg.scores, "paths.scores"));
  const bool needs_distances =
      std::any_of(records.begin(), records.end(), [](const auto& r) {
        return !r.pixel_distance || !r.latent_distance;
      });
  std::optional<SampleManifest> real_manifest, fake_manifest;
  std::optional<EmbeddingMatrix> real_emb, fake_emb;
  if (needs_distances && !cfg.real_manifest.empty() &&
      !cfg.fake_manifest.empty()) {
    real_manifest = ReadManifest(ctx.Input(cfg.real_manifest, "paths.real_manifest"));
    fake_manifest = ReadManifest(ctx.Input(cfg.fake_manifest, "paths.fake_manifest"));
    PairSources sources;
    sources.real_manifest = &*real_manifest;
    sources.fake_manifest = &*fake_manifest;
    if (!cfg.real_embeddings.empty() && !cfg.fake_embeddings.empty()) {
      real_emb = ReadEmbeddings(ctx.Input(cfg.real_embeddings, "paths.real_embeddings"));
      fake_emb = ReadEmbeddings(ctx.Input(cfg.fake_embeddings, "paths.fake_embeddings"));
      sources.real_embeddings = &*real_emb;
      sources.fake_embeddings = &*fake_emb;
    }
    sources.images_root = cfg.images_root;
    sources.image_side = cfg.image_side;
    FillMissingDistances(records, sources);
  }
  const PrivacySummary s = AuditPrivacy(records, cfg.privacy);
  ctx.WriteJson("privacy.json", PrivacyJson(s, cfg.privacy));
  ctx.Write("privacy.csv", PrivacyPerPromptCsv(s));
  ctx.Write("privacy.md", PrivacyMarkdown(s, cfg.privacy));
}

inline void RunConditional(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  const EmbeddingMatrix real =
      ReadEmbeddings(ctx.Input(cfg.real_embeddings, "paths.real_embeddings"));
  const EmbeddingMatrix fake =
      ReadEmbeddings(ctx.Input(cfg.fake_embeddings, "paths.fake_embeddings"));
  const SampleManifest real_manifest =
      ReadManifest(ctx.Input(cfg.real_manifest, "paths.real_manifest"));
  const SampleManifest fake_manifest =
      ReadManifest(ctx.Input(cfg.fake_manifest, "paths.fake_manifest"));
  ConditionalConfig cc;
  cc.min_stratum = cfg.min_stratum;
  cc.kid = cfg.kid;
  cc.prdc = cfg.prdc;
  const ConditionalReport r =
      ConditionalMetrics(real, fake, real_manifest, fake_manifest, cc, ctx.exec());
  ctx.WriteJson("conditional.json", ConditionalJson(r));
  ctx.Write("conditional.csv", ConditionalCsv(r));
  ctx.Write("conditional.md", ConditionalMarkdown(r));
}

namespace commands_internal {

struct KeyedColumn {
  std::vector<std::string> keys;
  std::vector<double> values;
};

inline KeyedColumn ResolveColumn(RunContext& ctx, const ColumnRef& ref,
                                 const RankTable* ranks) {
  KeyedColumn out;
  if (ref.table.empty()) {
    if (!ranks) {
      throw Error(ErrorCode::kInvalidConfig,
                  "column '" + ref.column + "' needs a table");
    }
    out.keys = ranks->model_ids;
    if (ref.column == "average_rank") {
      out.values = ranks->average_rank;
    } else if (ref.column == "normalized_rank") {
      out.values.assign(ranks->normalized_rank.begin(),
                        ranks->normalized_rank.end());
    } else {
      std::size_t k = ranks->metric_names.size();
      for (std::size_t i = 0; i < ranks->metric_names.size(); ++i) {
        if (ranks->metric_names[i] == ref.column) k = i;
      }
      if (k == ranks->metric_names.size()) {
        throw Error(ErrorCode::kMissingColumn, ref.column, "rank table");
      }
      for (const auto& row : ranks->ranks) out.values.push_back(row[k]);
    }
  } else {
    const CsvTable csv = ReadCsv(ctx.Input(ref.table, "correlation table"));
    const std::size_t col = csv.RequireColumn(ref.column);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      out.keys.push_back(csv.rows[r][0]);
      out.values.push_back(ParseDouble(csv.rows[r][col], csv.Where(r)));
    }
  }
  if (ref.rank) out.values = RankMetric(out.values, *ref.rank);
  return out;
}

}  // namespace commands_internal

inline void RunRank(RunContext& ctx) {
  using commands_internal::ResolveColumn;
  const auto& cfg = ctx.cfg();
  std::optional<RankTable> ranks;
  std::string md;
  if (!cfg.rank.table.empty()) {
    const MetricTable table =
        ReadMetricTable(ctx.Input(cfg.rank.table, "rank.table"),
                        cfg.rank.directions, cfg.rank.default_direction);
    ranks = AggregateRanks(table);
    md = RankTableMarkdown(*ranks);
    ctx.Write("ranks.csv", RankTableCsv(*ranks));
  } else if (cfg.rank.correlations.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "rank needs rank.table or rank.correlations");
  }

  Json correlations = Json::array();
  std::string csv = "name,method,n,value\n";
  std::string md_corr;
  for (const auto& spec : cfg.rank.correlations) {
    const auto x = ResolveColumn(ctx, spec.x, ranks ? &*ranks : nullptr);
    const auto y = ResolveColumn(ctx, spec.y, ranks ? &*ranks : nullptr);
    const auto [a, b] = AlignByKey(x.keys, x.values, y.keys, y.values);
    const double value = spec.method == "spearman" ? Spearman(a, b) : Pearson(a, b);
    correlations.push_back({{"name", spec.name},
                            {"method", spec.method},
                            {"n", a.size()},
                            {"value", value}});
    csv += CsvEscape(spec.name) + "," + spec.method + "," +
           std::to_string(a.size()) + "," + FormatDouble(value) + "\n";
    md_corr += "| " + spec.name + " | " + spec.method + " | " +
               std::to_string(a.size()) + " | " + FormatFixed(value, 4) + " |\n";
  }
  if (!md_corr.empty()) {
    if (!md.empty()) md += "\n";
    md += "| Correlation | Method | n | Value |\n| --- | --- | --- | --- |\n" +
          md_corr;
  }
  Json j = Json::object();
  if (ranks) j["ranks"] = RankTableJson(*ranks);
  j["correlations"] = correlations;
  ctx.WriteJson("ranks.json", j);
  ctx.Write("ranks.md", md);
  ctx.Write("correlations.csv", csv);
}

inline void RunReport(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  const auto& rs = cfg.report;
  if (rs.fidelity_table.empty() && rs.pathology_table.empty() &&
      rs.privacy_table.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "report needs at least one of report.fidelity_table, "
                "report.pathology_table, report.privacy_table");
  }
  std::string md = "# " + rs.title + "\n";
  if (!rs.fidelity_table.empty()) {
    const MetricTable t = ReadMetricTable(
        ctx.Input(rs.fidelity_table, "report.fidelity_table"), rs.directions);
    md += "\n## Generation quality\n\n" + MetricTableMarkdown(t, 3);
    md += "\n## Ranking\n\n" + RankTableMarkdown(AggregateRanks(t));
  }
  if (!rs.pathology_table.empty()) {
    const MetricTable t =
        ReadMetricTable(ctx.Input(rs.pathology_table, "report.pathology_table"),
                        rs.directions, Direction::kLowerBetter);
    md += "\n## Per-condition FID\n\n" + MetricTableMarkdown(t, 2);
  }
  if (!rs.privacy_table.empty()) {
    const MetricTable t = ReadMetricTable(
        ctx.Input(rs.privacy_table, "report.privacy_table"), rs.directions);
    md += "\n## Privacy\n\n" + MetricTableMarkdown(t, 3);
  }
  ctx.Write("report.md", md);
}

// Format and schema checks. Hard failures throw; soft findings become
// warnings in validate.json.
inline std::size_t RunValidate(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  Json checks = Json::array();
  std::vector<std::string> warnings;
  auto passed = [&](std::string_view kind, const std::string& path,
                    std::string detail) {
    checks.push_back({{"kind", kind}, {"path", path}, {"detail", detail}});
  };
  std::map<std::string, EmbeddingMatrix> embeddings;
  for (const auto* path : {&cfg.real_embeddings, &cfg.fake_embeddings}) {
    if (path->empty()) continue;
    EmbeddingMatrix m = ReadEmbeddings(ctx.Input(*path, "embeddings"));
    passed("embeddings", *path,
           std::to_string(m.rows()) + " x " + std::to_string(m.dim()));
    embeddings.emplace(*path, std::move(m));
  }
  const std::pair<const std::string*, const std::string*> pairs[] = {
      {&cfg.real_manifest, &cfg.real_embeddings},
      {&cfg.fake_manifest, &cfg.fake_embeddings}};
  for (const auto& [manifest_path, emb_path] : pairs) {
    if (manifest_path->empty()) continue;
    const SampleManifest m = ReadManifest(ctx.Input(*manifest_path, "manifest"));
    passed("manifest", *manifest_path, std::to_string(m.records.size()) + " rows");
    auto it = embeddings.find(*emb_path);
    if (it == embeddings.end()) continue;
    const auto& ids = it->second.ids();
    if (ids.size() != m.records.size()) {
      warnings.push_back(*emb_path + ": " + std::to_string(ids.size()) +
                         " embeddings for " + std::to_string(m.records.size()) +
                         " manifest rows");
    }
    std::size_t missing = 0;
    for (const auto& r : m.records) {
      if (!it->second.IndexOf(r.sample_id)) ++missing;
    }
    if (missing > 0) {
      warnings.push_back(*manifest_path + ": " + std::to_string(missing) +
                         " samples have no embedding in " + *emb_path);
    }
    bool same_order = ids.size() == m.records.size();
    for (std::size_t i = 0; same_order && i < ids.size(); ++i) {
      same_order = ids[i] == m.records[i].sample_id;
    }
    if (!same_order && missing == 0) {
      warnings.push_back(*emb_path + ": ids are not in manifest order");
    }
  }
  if (!cfg.scores.empty()) {
    const auto records = ReadScoreFile(ctx.Input(cfg.scores, "paths.scores"));
    passed("scores", cfg.scores, std::to_string(records.size()) + " pairs");
    const PromptExtremaResult extrema = PerPromptExtrema(records, cfg.privacy);
    for (const auto& w : extrema.warnings) warnings.push_back(cfg.scores + ": " + w);
  }
  if (!cfg.alignment_scores.empty()) {
    const double mean = MeanAlignment(
        ReadCsv(ctx.Input(cfg.alignment_scores, "paths.alignment_scores")));
    passed("alignment_scores", cfg.alignment_scores, "mean " + FormatDouble(mean));
  }
  if (!cfg.rank.table.empty()) {
    const MetricTable t =
        ReadMetricTable(ctx.Input(cfg.rank.table, "rank.table"),
                        cfg.rank.directions, cfg.rank.default_direction);
    passed("metric_table", cfg.rank.table,
           std::to_string(t.num_models()) + " x " + std::to_string(t.num_metrics()));
  }
  if (checks.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "nothing to validate");
  }
  ctx.WriteJson("validate.json", {{"checks", checks},
                                  {"warnings", warnings},
                                  {"num_warnings", warnings.size()}});
  return warnings.size();
}

}  // namespace genmetrics::cli
