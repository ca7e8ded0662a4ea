// Copyright 2026 The cotune Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cotune: command-line front end.
//
//   cotune gen-data    --oracle-spec F [--mode ofat|random-k] [--k N] [--platforms all|P,...]
//   cotune train       --data F [--seed S] [forest flags]
//   cotune recommend   --platform P --workload W [--budget N] [--seed S] [RRS flags]
//   cotune evaluate    --recommendations F... (--oracle-spec F | --measured F)
//   cotune brute-force --platform P [--workload W|all]
//
// Every artifact lands in --out-dir together with manifest.json, which
// records the flags of each subcommand run there and the catalog hash.
// Exit codes: 0 success, 1 data/runtime error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cotune/cotune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string catalog;  // empty: bundled
  std::string out_dir = "run";
};

struct Loaded {
  cotune::Catalog catalog;
  std::string catalog_hash;
};

Loaded load_catalog(const CommonFlags& flags) {
  Loaded out;
  if (flags.catalog.empty()) {
    out.catalog = cotune::bundled_catalog();
    out.catalog_hash = cotune::hex64(cotune::fnv1a64(cotune::bundled_catalog_json()));
  } else {
    const std::string text = cotune::read_file(flags.catalog);
    out.catalog = cotune::parse_catalog(text);
    out.catalog_hash = cotune::hex64(cotune::fnv1a64(text));
  }
  return out;
}

std::string out_path(const CommonFlags& flags, const std::string& name) {
  return (fs::path(flags.out_dir) / name).string();
}

void prepare_out_dir(const CommonFlags& flags) {
  std::error_code ec;
  fs::create_directories(flags.out_dir, ec);
  if (ec || !fs::is_directory(flags.out_dir)) {
    throw cotune::Error("cannot create output directory '" + flags.out_dir + "'");
  }
}

// Merges this run's record into <out-dir>/manifest.json.
void record_manifest(const CommonFlags& flags, const Loaded& loaded, const std::string& key, json record) {
  const std::string path = out_path(flags, "manifest.json");
  json manifest = json::object();
  if (fs::exists(path)) {
    try {
      manifest = json::parse(cotune::read_file(path));
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  manifest["tool"] = "cotune";
  manifest["catalog"] = flags.catalog.empty() ? "<bundled>" : flags.catalog;
  manifest["catalog_hash"] = loaded.catalog_hash;
  manifest["runs"][key] = std::move(record);
  cotune::write_file(path, manifest.dump(2) + "\n");
}

std::vector<cotune::Platform> resolve_platforms(const std::vector<std::string>& names, const cotune::Catalog& catalog) {
  std::vector<cotune::Platform> out;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) {
    for (const auto& spec : catalog.platforms) out.push_back(spec.platform);
    return out;
  }
  for (const auto& n : names) {
    const auto p = cotune::parse_platform(n);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

std::string model_file_name(cotune::Platform p) { return "model_" + std::string(cotune::to_string(p)) + ".json"; }

cotune::ForestModel load_model(const std::string& model_path, const std::string& models_dir, cotune::Platform p) {
  std::string path = model_path;
  if (path.empty()) path = (fs::path(models_dir) / model_file_name(p)).string();
  if (!fs::exists(path)) throw cotune::Error("no model for " + std::string(cotune::to_string(p)) + " at '" + path + "'");
  auto model = cotune::forest_from_json(cotune::read_file(path));
  if (model.platform != p) {
    throw cotune::Error("model '" + path + "' is for " + std::string(cotune::to_string(model.platform)));
  }
  return model;
}

cotune::PriceTable load_prices(const std::string& path, const cotune::Catalog& catalog) {
  return path.empty() ? cotune::price_table(catalog) : cotune::load_prices(path);
}

// ---- gen-data -------------------------------------------------------------

struct GenDataFlags {
  std::string oracle_spec;
  std::string mode = "ofat";
  std::size_t k = 0;
  std::vector<std::string> platforms;
  std::uint64_t seed = 1;
};

int run_gen_data(const CommonFlags& common, const GenDataFlags& f) {
  const Loaded loaded = load_catalog(common);
  const auto spec = cotune::load_oracle_spec(f.oracle_spec);
  const auto mode = cotune::parse_generation_mode(f.mode);
  const auto platforms = resolve_platforms(f.platforms, loaded.catalog);
  const auto data = cotune::gen_dataset(spec, loaded.catalog, platforms, mode, f.seed, f.k);

  prepare_out_dir(common);
  const std::string csv = out_path(common, "dataset.csv");
  cotune::write_csv(csv, data, loaded.catalog);

  json platform_names = json::array();
  for (const auto p : platforms) platform_names.push_back(cotune::to_string(p));
  json provenance = {{"source", "synthetic oracle"},
                     {"mode", f.mode},
                     {"k", f.k},
                     {"platforms", platform_names},
                     {"seed", f.seed},
                     {"rows", data.size()},
                     {"oracle_spec", json::parse(cotune::oracle_spec_to_json(spec))},
                     {"dataset_hash", cotune::hex64(cotune::fnv1a64(cotune::read_file(csv)))}};
  cotune::write_file(out_path(common, "provenance.json"), provenance.dump(2) + "\n");
  record_manifest(common, loaded, "gen-data",
                  {{"oracle_spec", f.oracle_spec}, {"mode", f.mode}, {"k", f.k}, {"platforms", platform_names},
                   {"seed", f.seed}, {"outputs", {"dataset.csv", "provenance.json"}}});
  std::cout << data.size() << " rows written to " << csv << "\n";
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainFlags {
  std::string data;
  cotune::TrainOptions options;
};

int run_train(const CommonFlags& common, const TrainFlags& f) {
  const Loaded loaded = load_catalog(common);
  const auto data = cotune::load_csv(f.data, loaded.catalog);
  const auto trained = cotune::train_offline(data, loaded.catalog, f.options);

  prepare_out_dir(common);
  json outputs = json::array();
  for (const auto& [p, pm] : trained.models) {
    const std::string name = model_file_name(p);
    cotune::write_file(out_path(common, name), cotune::forest_to_json(pm.forest));
    outputs.push_back(name);
  }
  const std::string report = cotune::training_report_json(trained);
  cotune::write_file(out_path(common, "r2_report.json"), report);
  outputs.push_back("r2_report.json");

  const auto& h = f.options.hyper;
  record_manifest(common, loaded, "train",
                  {{"data", f.data},
                   {"seed", f.options.seed},
                   {"train_fraction", f.options.train_fraction},
                   {"stratify", f.options.stratify_by_workload},
                   {"min_samples", f.options.min_samples},
                   {"hyper",
                    {{"n_trees", h.n_trees}, {"max_depth", h.max_depth}, {"min_samples_leaf", h.min_samples_leaf},
                     {"features_per_split", h.features_per_split}, {"bootstrap", h.bootstrap}}},
                   {"outputs", outputs}});

  std::cout << "platform  forest_val_r2  linear_val_r2  val_mre\n";
  for (const auto& [p, pm] : trained.models) {
    std::printf("%-8s  %13.4f  %13.4f  %7.4f\n", std::string(cotune::to_string(p)).c_str(), pm.forest_validation_r2,
                pm.linear_validation_r2, pm.forest_validation_mre);
  }
  for (const auto p : trained.missing) std::cout << cotune::to_string(p) << ": no training data, no model\n";
  return kExitOk;
}

// ---- recommend ------------------------------------------------------------

struct ModelFlags {
  std::string model;
  std::string models_dir = "run";
  std::string platform;
  std::string workload;
  std::string prices;
};

struct RecommendFlags {
  ModelFlags model;
  cotune::RRSParams rrs;
};

json rrs_json(const cotune::RRSParams& p) {
  return {{"confidence", p.confidence},         {"explore_percentile", p.explore_percentile},
          {"exploit_percentile", p.exploit_percentile}, {"shrink_ratio", p.shrink_ratio},
          {"exploit_samples", p.resolved_exploit_samples()}, {"min_box_edge", p.min_box_edge},
          {"budget", p.eval_budget},               {"seed", p.seed}};
}

int run_recommend(const CommonFlags& common, const RecommendFlags& f) {
  const Loaded loaded = load_catalog(common);
  const auto platform = cotune::parse_platform(f.model.platform);
  const auto workload = cotune::parse_workload(f.model.workload);
  const auto model = load_model(f.model.model, f.model.models_dir, platform);
  const auto prices = load_prices(f.model.prices, loaded.catalog);
  const auto space = loaded.catalog.space(platform);

  auto out = cotune::recommend(platform, workload, model, space, f.rrs, prices);
  const std::string tag = std::string(cotune::to_string(platform)) + "_" + std::string(cotune::to_string(workload));
  out.recommendation.trace_file = "trace_" + tag + ".csv";

  prepare_out_dir(common);
  cotune::write_file(out_path(common, out.recommendation.trace_file), out.trace.to_csv());
  const std::string rec_json = cotune::recommendation_to_json(out.recommendation);
  cotune::write_file(out_path(common, "recommendation_" + tag + ".json"), rec_json);
  record_manifest(common, loaded, "recommend " + tag,
                  {{"model_version", out.recommendation.model_version},
                   {"prices", f.model.prices.empty() ? "<catalog>" : f.model.prices},
                   {"rrs", rrs_json(f.rrs)},
                   {"outputs", {"recommendation_" + tag + ".json", out.recommendation.trace_file}}});
  std::cout << rec_json;
  return kExitOk;
}

// ---- brute-force ----------------------------------------------------------

struct BruteForceFlags {
  ModelFlags model;
  std::uint64_t cap = cotune::kBruteForceCap;
};

int run_brute_force(const CommonFlags& common, const BruteForceFlags& f) {
  const Loaded loaded = load_catalog(common);
  const auto platform = cotune::parse_platform(f.model.platform);
  const auto model = load_model(f.model.model, f.model.models_dir, platform);
  const auto prices = load_prices(f.model.prices, loaded.catalog);
  const auto space = loaded.catalog.space(platform);
  cotune::check_compatible(model, space);

  std::vector<cotune::Workload> workloads;
  if (f.model.workload == "all") {
    workloads.assign(cotune::kAllWorkloads.begin(), cotune::kAllWorkloads.end());
  } else {
    workloads.push_back(cotune::parse_workload(f.model.workload));
  }

  prepare_out_dir(common);
  json outputs = json::array();
  for (const auto workload : workloads) {
    const auto result = cotune::brute_force_min(
        [&](const cotune::JointConfig& c) { return model.predict(c, workload, space); }, space, f.cap);
    auto rec = cotune::describe(platform, workload, result.best, space);
    rec.predicted_time = result.value;
    rec.predicted_cost = cotune::cost_of(space.clouds()[result.best.cloud], result.value, prices);
    rec.model_version = cotune::model_version(model);
    rec.evaluations = result.evaluated;

    json j = json::parse(cotune::recommendation_to_json(rec));
    j["search"] = {{"method", "exhaustive"}, {"evaluations", result.evaluated}};
    const std::string name =
        "brute_force_" + std::string(cotune::to_string(platform)) + "_" + std::string(cotune::to_string(workload)) +
        ".json";
    const std::string text = j.dump(2) + "\n";
    cotune::write_file(out_path(common, name), text);
    outputs.push_back(name);
    std::cout << text;
  }
  record_manifest(common, loaded, "brute-force " + std::string(cotune::to_string(platform)),
                  {{"model_version", cotune::model_version(model)},
                   {"workload", f.model.workload},
                   {"cap", f.cap},
                   {"outputs", outputs}});
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateFlags {
  std::vector<std::string> recommendations;
  std::string oracle_spec;
  std::string measured;
  std::string prices;
};

int run_evaluate(const CommonFlags& common, const EvaluateFlags& f) {
  if (f.oracle_spec.empty() == f.measured.empty()) {
    throw UsageError("evaluate needs exactly one of --oracle-spec or --measured");
  }
  const Loaded loaded = load_catalog(common);
  std::vector<cotune::Recommendation> recs;
  for (const auto& path : f.recommendations) {
    recs.push_back(cotune::recommendation_from_json(cotune::read_file(path), loaded.catalog));
  }
  const auto prices = load_prices(f.prices, loaded.catalog);

  cotune::EvaluationReport report;
  if (!f.oracle_spec.empty()) {
    report = cotune::evaluate(recs, cotune::OracleTruth(cotune::load_oracle_spec(f.oracle_spec)), loaded.catalog, prices);
  } else {
    report = cotune::evaluate(recs, cotune::MeasuredTruth(cotune::load_csv(f.measured, loaded.catalog)),
                              loaded.catalog, prices);
  }

  prepare_out_dir(common);
  cotune::write_file(out_path(common, "evaluation.json"), report.to_json());
  cotune::write_file(out_path(common, "evaluation.csv"), report.to_csv());
  record_manifest(common, loaded, "evaluate",
                  {{"recommendations", f.recommendations},
                   {"truth", f.oracle_spec.empty() ? "measured:" + f.measured : "oracle:" + f.oracle_spec},
                   {"prices", f.prices.empty() ? "<catalog>" : f.prices},
                   {"outputs", {"evaluation.json", "evaluation.csv"}}});

  std::cout << "platform  mean_time_reduction  mean_cost_reduction\n";
  for (const auto& [p, s] : report.per_platform) {
    std::printf("%-8s  %19.4f  %19.4f\n", std::string(cotune::to_string(p)).c_str(), s.mean_time_reduction,
                s.mean_cost_reduction);
  }
  std::printf("overall   %19.4f  %19.4f\nmean relative prediction error: %.4f\n", report.overall.mean_time_reduction,
              report.overall.mean_cost_reduction, report.mean_relative_error);
  return kExitOk;
}

const CLI::IsMember kPlatformNames({"Hadoop", "Spark", "Flink"});
const CLI::IsMember kWorkloadNames({"Sort", "WordCount", "KMeans"});

void add_common(CLI::App* cmd, CommonFlags& common) {
  cmd->add_option("--catalog", common.catalog, "Catalog JSON (default: bundled)")->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", common.out_dir, "Run directory for all artifacts")->capture_default_str();
}

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--model", m.model, "Model JSON (overrides --models-dir)")->check(CLI::ExistingFile);
  cmd->add_option("--models-dir", m.models_dir, "Directory holding model_<Platform>.json")->capture_default_str();
  cmd->add_option("--platform", m.platform, "Hadoop, Spark or Flink")->required()->check(kPlatformNames);
  cmd->add_option("--prices", m.prices, "Price file {flavor: price_per_hour} (default: catalog prices)")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cotune: joint cloud and data-platform configuration tuning"};
  app.require_subcommand(1);

  CommonFlags common;

  GenDataFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a labelled dataset from the synthetic oracle");
  add_common(gen_cmd, common);
  gen_cmd->add_option("--oracle-spec", gen.oracle_spec, "Oracle spec JSON")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--mode", gen.mode, "ofat or random-k")
      ->capture_default_str()
      ->check(CLI::IsMember({"ofat", "random-k"}));
  gen_cmd->add_option("--k", gen.k, "Rows per platform in random-k mode");
  gen_cmd->add_option("--platforms,--platform", gen.platforms, "all, or a comma-separated platform list")
      ->delimiter(',')
      ->check(CLI::IsMember({"all", "Hadoop", "Spark", "Flink"}));
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Fit per-platform surrogate models");
  add_common(train_cmd, common);
  train_cmd->add_option("--data", train.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train.options.seed, "Split and bootstrap seed")->capture_default_str();
  train_cmd->add_option("--train-fraction", train.options.train_fraction)->capture_default_str();
  train_cmd->add_flag("--stratify", train.options.stratify_by_workload, "Stratify the split by workload");
  train_cmd->add_option("--min-samples", train.options.min_samples, "Per-platform sample floor")->capture_default_str();
  train_cmd->add_option("--trees", train.options.hyper.n_trees)->capture_default_str();
  train_cmd->add_option("--max-depth", train.options.hyper.max_depth)->capture_default_str();
  train_cmd->add_option("--min-leaf", train.options.hyper.min_samples_leaf)->capture_default_str();
  train_cmd->add_option("--features-per-split", train.options.hyper.features_per_split, "0 = ceil(d/3)")
      ->capture_default_str();

  RecommendFlags rec;
  rec.rrs.seed = 1;
  auto* rec_cmd = app.add_subcommand("recommend", "Recommend a cloud + platform configuration");
  add_common(rec_cmd, common);
  add_model_flags(rec_cmd, rec.model);
  rec_cmd->add_option("--workload", rec.model.workload, "Sort, WordCount or KMeans")
      ->required()
      ->check(kWorkloadNames);
  rec_cmd->add_option("--budget", rec.rrs.eval_budget, "Objective evaluations")->capture_default_str();
  rec_cmd->add_option("--seed", rec.rrs.seed, "Search seed")->capture_default_str();
  rec_cmd->add_option("--confidence", rec.rrs.confidence)->capture_default_str();
  rec_cmd->add_option("--explore-percentile", rec.rrs.explore_percentile)->capture_default_str();
  rec_cmd->add_option("--exploit-percentile", rec.rrs.exploit_percentile)->capture_default_str();
  rec_cmd->add_option("--shrink", rec.rrs.shrink_ratio)->capture_default_str();
  rec_cmd->add_option("--exploit-samples", rec.rrs.exploit_samples, "0 = exploration round size")
      ->capture_default_str();
  rec_cmd->add_option("--min-box-edge", rec.rrs.min_box_edge)->capture_default_str();

  EvaluateFlags eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compare recommendations with per-cloud defaults");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--recommendations", eval.recommendations, "Recommendation JSON files")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--oracle-spec", eval.oracle_spec, "Score against the synthetic oracle")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--measured", eval.measured, "Score against a measured dataset CSV")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--prices", eval.prices, "Price file (default: catalog prices)")->check(CLI::ExistingFile);

  BruteForceFlags bf;
  auto* bf_cmd = app.add_subcommand("brute-force", "Exact optimum of the surrogate by enumeration");
  add_common(bf_cmd, common);
  add_model_flags(bf_cmd, bf.model);
  bf.model.workload = "all";
  bf_cmd->add_option("--workload", bf.model.workload, "Sort, WordCount, KMeans or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"all", "Sort", "WordCount", "KMeans"}));
  bf_cmd->add_option("--cap", bf.cap, "Maximum space size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_data(common, gen);
    if (train_cmd->parsed()) return run_train(common, train);
    if (rec_cmd->parsed()) return run_recommend(common, rec);
    if (eval_cmd->parsed()) return run_evaluate(common, eval);
    if (bf_cmd->parsed()) return run_brute_force(common, bf);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
