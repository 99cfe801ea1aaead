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
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace {

using genmetrics::Error;
using genmetrics::ErrorCategory;
using genmetrics::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Overrides {
  std::string config;
  std::optional<std::string> output_dir, threads, real, fake, real_manifest,
      fake_manifest, images_root, scores, alignment_scores, aggregation,
      rank_table;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::optional<std::size_t> k, num_subsets, subset_size, min_stratum;
};

nlohmann::json LoadConfig(const Overrides& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config.empty()) {
    std::string text;
    try {
      text = genmetrics::ReadTextFile(o.config);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigParseError, "cannot read config", o.config);
    }
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kConfigParseError, e.what(), o.config);
    }
  }
  auto set = [&](std::initializer_list<const char*> keys, const auto& value) {
    if (!value) return;
    nlohmann::json* node = &doc;
    const char* last = nullptr;
    for (const char* key : keys) {
      if (last) node = &(*node)[last];
      last = key;
    }
    (*node)[last] = *value;
  };
  set({"output_dir"}, o.output_dir);
  set({"threads"}, o.threads);
  set({"rng_seed"}, o.seed);
  set({"paths", "real_embeddings"}, o.real);
  set({"paths", "fake_embeddings"}, o.fake);
  set({"paths", "real_manifest"}, o.real_manifest);
  set({"paths", "fake_manifest"}, o.fake_manifest);
  set({"paths", "images_root"}, o.images_root);
  set({"paths", "scores"}, o.scores);
  set({"paths", "alignment_scores"}, o.alignment_scores);
  set({"privacy", "delta"}, o.delta);
  set({"privacy", "aggregation"}, o.aggregation);
  set({"prdc", "k"}, o.k);
  set({"kid", "num_subsets"}, o.num_subsets);
  set({"kid", "subset_size"}, o.subset_size);
  set({"conditional", "min_stratum"}, o.min_stratum);
  set({"rank", "table"}, o.rank_table);
  return doc;
}

int ExitCodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return kExitConfig;
    case ErrorCategory::kNumerical: return kExitNumerical;
    case ErrorCategory::kData: break;
  }
  return kExitData;
}

int ReportError(const Error& e) {
  nlohmann::ordered_json j = {
      {"error", std::string(genmetrics::ErrorCodeName(e.code()))},
      {"message", e.message()},
      {"context", e.context()}};
  std::cerr << j.dump() << "\n";
  return ExitCodeFor(e.category());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation engine for generated chest radiographs"};
  app.set_version_flag("--version", std::string(genmetrics::cli::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("-c,--config", o.config, "JSON run configuration");
  app.add_option("-o,--output-dir", o.output_dir, "Directory for report files");
  app.add_option("--threads", o.threads, "Worker threads, or \"auto\"");
  app.add_option("--seed", o.seed, "Root RNG seed");
  app.add_option("--real", o.real, "Real-image embeddings (CXGB)");
  app.add_option("--fake", o.fake, "Synthetic-image embeddings (CXGB)");
  app.add_option("--real-manifest", o.real_manifest, "Real sample manifest");
  app.add_option("--fake-manifest", o.fake_manifest, "Synthetic sample manifest");
  app.add_option("--images-root", o.images_root, "Root for manifest image paths");
  app.add_option("--scores", o.scores, "Re-identification score CSV");
  app.add_option("--alignment-scores", o.alignment_scores,
                 "Per-sample image-text alignment CSV");
  app.add_option("--delta", o.delta, "Re-identification threshold");
  app.add_option("--aggregation", o.aggregation, "per_prompt or pairs");
  app.add_option("--k", o.k, "PRDC neighbour count");
  app.add_option("--num-subsets", o.num_subsets, "KID subset count");
  app.add_option("--subset-size", o.subset_size, "KID subset size");
  app.add_option("--min-stratum", o.min_stratum, "Minimum samples per condition");
  app.add_option("--table", o.rank_table, "Metric table CSV for rank");

  const std::pair<const char*, const char*> commands[] = {
      {"fidelity", "FID and KID between real and synthetic embeddings"},
      {"prdc", "Precision, recall, density and coverage"},
      {"privacy", "Re-identification audit from a score file"},
      {"conditional", "Per-condition fidelity metrics"},
      {"rank", "Rank aggregation and correlations over a metric table"},
      {"report", "Combined Markdown report from metric tables"},
      {"validate", "Schema and format checks on inputs"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    const genmetrics::cli::RunConfig cfg =
        genmetrics::cli::ParseRunConfig(LoadConfig(o));
    genmetrics::cli::RunContext ctx(cfg, sub);
    if (sub == "fidelity") {
      genmetrics::cli::RunFidelity(ctx);
    } else if (sub == "prdc") {
      genmetrics::cli::RunPrdc(ctx);
    } else if (sub == "privacy") {
      genmetrics::cli::RunPrivacy(ctx);
    } else if (sub == "conditional") {
      genmetrics::cli::RunConditional(ctx);
    } else if (sub == "rank") {
      genmetrics::cli::RunRank(ctx);
    } else if (sub == "report") {
      genmetrics::cli::RunReport(ctx);
    } else {
      const std::size_t warnings = genmetrics::cli::RunValidate(ctx);
      std::cout << "validate: " << warnings << " warning(s)\n";
    }
    ctx.Finish();
    std::cout << sub << ": wrote " << cfg.output_dir << "\n";
  } catch (const Error& e) {
    return ReportError(e);
  } catch (const std::filesystem::filesystem_error& e) {
    return ReportError(Error(ErrorCode::kIoFailure, e.what()));
  }
  return kExitOk;
}
