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

#include "cotune/pipeline.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace cotune {
namespace {

using nlohmann::json;

std::uint64_t platform_stream(Platform p) { return static_cast<std::uint64_t>(p); }

void accumulate(ReductionSummary& s, const EvaluationRow& row) {
  ++s.rows;
  s.mean_time_reduction += row.time_reduction;
  s.mean_cost_reduction += row.cost_reduction;
}

void finalize(ReductionSummary& s) {
  if (s.rows == 0) return;
  s.mean_time_reduction /= static_cast<double>(s.rows);
  s.mean_cost_reduction /= static_cast<double>(s.rows);
}

json summary_json(const ReductionSummary& s) {
  return {{"rows", s.rows}, {"mean_time_reduction", s.mean_time_reduction},
          {"mean_cost_reduction", s.mean_cost_reduction}};
}

}  // namespace

const PlatformModel& TrainedModels::at(Platform p) const {
  const auto it = models.find(p);
  if (it == models.end()) throw ConstraintError("no trained model for " + std::string(to_string(p)));
  return it->second;
}

TrainedModels train_offline(const Dataset& data, const Catalog& catalog, const TrainOptions& options) {
  if (data.empty()) throw ConstraintError("training dataset is empty");
  options.hyper.validate();

  TrainedModels trained;
  trained.options = options;
  for (const auto& spec : catalog.platforms) {
    const Platform p = spec.platform;
    const Dataset subset = data.only(p);
    if (subset.empty()) {
      trained.missing.push_back(p);
      continue;
    }
    if (subset.size() < options.min_samples) {
      throw ConstraintError(std::string(to_string(p)) + " has " + std::to_string(subset.size()) +
                            " samples, fewer than the floor of " + std::to_string(options.min_samples));
    }
    const JointSpace space = catalog.space(p);
    SplitOptions split_options;
    split_options.train_fraction = options.train_fraction;
    split_options.seed = derive_seed(options.seed, platform_stream(p));
    split_options.stratify_by_workload = options.stratify_by_workload;
    const DataSplit parts = split(subset, split_options);

    PlatformModel pm;
    pm.n_train = parts.train.size();
    pm.n_validation = parts.validation.size();
    pm.forest = fit_forest(parts.train, space, options.hyper, derive_seed(options.seed, 100 + platform_stream(p)),
                           options.threads);
    const auto predicted = predict_all(pm.forest, parts.validation, space);
    const auto actual = parts.validation.labels();
    pm.forest_train_r2 = pm.forest.train_r2;
    pm.forest_validation_r2 = r2_score(predicted, actual);
    pm.forest_validation_mre = mean_relative_error(predicted, actual);
    pm.forest.validation_r2 = pm.forest_validation_r2;
    pm.linear = fit_linear(parts.train, space);
    pm.linear_validation_r2 = evaluate(pm.linear, parts.validation, space);
    trained.models.emplace(p, std::move(pm));
  }
  for (const Platform p : data.platforms()) {
    if (!catalog.has_platform(p)) {
      throw ConstraintError("dataset contains " + std::string(to_string(p)) + ", which the catalog lacks");
    }
  }
  return trained;
}

std::string training_report_json(const TrainedModels& trained) {
  json platforms = json::object();
  for (const auto& [p, pm] : trained.models) {
    platforms[std::string(to_string(p))] = {
        {"n_train", pm.n_train},
        {"n_validation", pm.n_validation},
        {"model_version", model_version(pm.forest)},
        {"forest",
         {{"train_r2", pm.forest_train_r2},
          {"validation_r2", pm.forest_validation_r2},
          {"validation_mean_relative_error", pm.forest_validation_mre}}},
        {"linear", {{"validation_r2", pm.linear_validation_r2}}},
    };
  }
  json missing = json::array();
  for (const Platform p : trained.missing) missing.push_back(to_string(p));
  const auto& h = trained.options.hyper;
  json j;
  j["platforms"] = platforms;
  j["missing"] = missing;
  j["seed"] = trained.options.seed;
  j["train_fraction"] = trained.options.train_fraction;
  j["hyper"] = {{"n_trees", h.n_trees}, {"max_depth", h.max_depth}, {"min_samples_leaf", h.min_samples_leaf},
                {"features_per_split", h.features_per_split}, {"bootstrap", h.bootstrap}};
  return j.dump(2) + "\n";
}

std::string model_version(const ForestModel& model) { return hex64(fnv1a64(forest_to_json(model))); }

Recommendation describe(Platform platform, Workload workload, const JointConfig& config, const JointSpace& space) {
  space.check(config);
  Recommendation rec;
  rec.platform = platform;
  rec.workload = workload;
  rec.config = config;
  rec.cloud_id = space.clouds()[config.cloud].id;
  const auto& params = space.platform_spec().parameters;
  for (std::size_t i = 0; i < params.size(); ++i) {
    rec.parameters.push_back(
        {params[i].id, params[i].name, params[i].domain[config.assignment[i]], value_label(config.assignment[i])});
  }
  return rec;
}

RecommendOutput recommend(Platform platform, Workload workload, const ForestModel& model, const JointSpace& space,
                          const RRSParams& params, const PriceTable& prices) {
  if (space.platform() != platform) throw ConstraintError("space does not match the requested platform");
  check_compatible(model, space);
  params.validate();

  const auto objective = [&](const UnitPoint& point) {
    return model.predict(decode(point, space), workload, space);
  };
  RRSResult search = rrs_minimize(objective, space.dimension(), params);
  const JointConfig best = decode(search.best_point, space);

  RecommendOutput out;
  out.recommendation = describe(platform, workload, best, space);
  out.recommendation.predicted_time = model.predict(best, workload, space);
  out.recommendation.predicted_cost = cost_of(space.clouds()[best.cloud], out.recommendation.predicted_time, prices);
  out.recommendation.model_version = model_version(model);
  out.recommendation.evaluations = search.trace.size();
  out.recommendation.search_seed = params.seed;
  out.trace = std::move(search.trace);
  return out;
}

std::string recommendation_to_json(const Recommendation& rec) {
  json params = json::array();
  for (const auto& p : rec.parameters) {
    params.push_back({{"id", p.id}, {"name", p.name}, {"value", p.value}, {"label", p.label}});
  }
  json j;
  j["platform"] = to_string(rec.platform);
  j["workload"] = to_string(rec.workload);
  j["cloud"] = rec.cloud_id;
  j["parameters"] = params;
  j["predicted_time_s"] = rec.predicted_time;
  j["predicted_cost"] = rec.predicted_cost;
  j["model_version"] = rec.model_version;
  j["search"] = {{"evaluations", rec.evaluations}, {"seed", rec.search_seed}};
  if (!rec.trace_file.empty()) j["trace_file"] = rec.trace_file;
  return j.dump(2) + "\n";
}

Recommendation recommendation_from_json(std::string_view text, const Catalog& catalog) {
  try {
    const json j = json::parse(text);
    const Platform platform = parse_platform(j.at("platform").get<std::string>());
    const Workload workload = parse_workload(j.at("workload").get<std::string>());
    const JointSpace space = catalog.space(platform);
    JointConfig config;
    config.cloud = space.cloud_index(j.at("cloud").get<std::string>());
    const auto& jp = j.at("parameters");
    std::string labels;
    for (std::size_t i = 0; i < jp.size(); ++i) {
      const auto& entry = jp[i];
      if (entry.at("id").get<std::string>() != space.platform_spec().parameters.at(i).id) {
        throw ParseError("recommendation: parameter " + std::to_string(i) + " is out of catalog order");
      }
      if (i > 0) labels += ';';
      labels += entry.at("label").get<std::string>();
    }
    config.assignment = space.parse_assignment(labels);
    Recommendation rec = describe(platform, workload, config, space);
    rec.predicted_time = j.at("predicted_time_s").get<double>();
    rec.predicted_cost = j.at("predicted_cost").get<double>();
    rec.model_version = j.value("model_version", "");
    if (j.contains("search")) {
      rec.evaluations = j["search"].value("evaluations", std::size_t{0});
      rec.search_seed = j["search"].value("seed", std::uint64_t{0});
    }
    rec.trace_file = j.value("trace_file", "");
    return rec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("recommendation: ") + e.what());
  }
}

double OracleTruth::time(const JointConfig& config, Workload workload, const JointSpace& space) const {
  return true_time(spec_, config, workload, space);
}

MeasuredTruth::MeasuredTruth(const Dataset& data) {
  for (const auto& s : data.samples) {
    auto& [sum, count] = runs_[Key{s.platform, s.workload, s.config}];
    sum += s.exec_time;
    ++count;
  }
}

double MeasuredTruth::time(const JointConfig& config, Workload workload, const JointSpace& space) const {
  const auto it = runs_.find(Key{space.platform(), workload, config});
  if (it == runs_.end()) {
    throw ConstraintError("no measurement for " + std::string(to_string(space.platform())) + " " +
                          std::string(to_string(workload)) + " on " + space.clouds()[config.cloud].id + " with " +
                          space.assignment_labels(config));
  }
  return it->second.first / static_cast<double>(it->second.second);
}

EvaluationReport evaluate(const std::vector<Recommendation>& recommendations, const TruthSource& truth,
                          const Catalog& catalog, const PriceTable& prices) {
  EvaluationReport report;
  double error_sum = 0.0;
  for (const auto& rec : recommendations) {
    const JointSpace space = catalog.space(rec.platform);
    space.check(rec.config);
    const CloudConfig& tuned_cloud = space.clouds()[rec.config.cloud];
    const double tuned_time = truth.time(rec.config, rec.workload, space);
    const double tuned_cost = cost_of(tuned_cloud, tuned_time, prices);

    PredictionCheck check{rec.platform, rec.workload, rec.predicted_time, tuned_time,
                          std::abs(rec.predicted_time - tuned_time) / tuned_time};
    error_sum += check.relative_error;
    report.predictions.push_back(check);

    for (std::size_t c = 0; c < space.clouds().size(); ++c) {
      EvaluationRow row;
      row.platform = rec.platform;
      row.workload = rec.workload;
      row.baseline_cloud = space.clouds()[c].id;
      row.default_time = truth.time(space.default_config(c), rec.workload, space);
      row.default_cost = cost_of(space.clouds()[c], row.default_time, prices);
      row.tuned_cloud = tuned_cloud.id;
      row.tuned_time = tuned_time;
      row.tuned_cost = tuned_cost;
      row.time_reduction = (row.default_time - row.tuned_time) / row.default_time;
      row.cost_reduction = row.default_cost > 0.0 ? (row.default_cost - row.tuned_cost) / row.default_cost : 0.0;
      accumulate(report.per_platform[rec.platform], row);
      accumulate(report.overall, row);
      report.rows.push_back(std::move(row));
    }
  }
  for (auto& [p, s] : report.per_platform) finalize(s);
  finalize(report.overall);
  if (!recommendations.empty()) report.mean_relative_error = error_sum / static_cast<double>(recommendations.size());
  return report;
}

std::string EvaluationReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"platform", to_string(r.platform)},
                         {"workload", to_string(r.workload)},
                         {"baseline_cloud", r.baseline_cloud},
                         {"default_time_s", r.default_time},
                         {"default_cost", r.default_cost},
                         {"tuned_cloud", r.tuned_cloud},
                         {"tuned_time_s", r.tuned_time},
                         {"tuned_cost", r.tuned_cost},
                         {"time_reduction", r.time_reduction},
                         {"cost_reduction", r.cost_reduction}});
  }
  json predictions_json = json::array();
  for (const auto& p : predictions) {
    predictions_json.push_back({{"platform", to_string(p.platform)},
                                {"workload", to_string(p.workload)},
                                {"predicted_time_s", p.predicted},
                                {"actual_time_s", p.actual},
                                {"relative_error", p.relative_error}});
  }
  json platforms = json::object();
  for (const auto& [p, s] : per_platform) platforms[std::string(to_string(p))] = summary_json(s);
  json j;
  j["rows"] = rows_json;
  j["predictions"] = predictions_json;
  j["per_platform"] = platforms;
  j["overall"] = summary_json(overall);
  j["mean_relative_error"] = mean_relative_error;
  return j.dump(2) + "\n";
}

std::string EvaluationReport::to_csv() const {
  std::string out =
      "platform,workload,baseline_cloud,default_time_s,default_cost,tuned_cloud,tuned_time_s,tuned_cost,"
      "time_reduction,cost_reduction\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.platform)) + ',' + std::string(to_string(r.workload)) + ',' + r.baseline_cloud +
           ',' + format_double(r.default_time) + ',' + format_double(r.default_cost) + ',' + r.tuned_cloud + ',' +
           format_double(r.tuned_time) + ',' + format_double(r.tuned_cost) + ',' + format_double(r.time_reduction) +
           ',' + format_double(r.cost_reduction) + '\n';
  }
  return out;
}

}  // namespace cotune
