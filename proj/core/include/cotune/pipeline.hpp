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

#pragma once

// Offline phase (fit one surrogate per platform), online phase (search the
// joint space against the surrogate) and the default-vs-tuned evaluation.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotune/configspace.hpp"
#include "cotune/cost.hpp"
#include "cotune/dataset.hpp"
#include "cotune/oracle.hpp"
#include "cotune/rrs.hpp"
#include "cotune/surrogate.hpp"

namespace cotune {

struct TrainOptions {
  ForestHyper hyper;
  std::uint64_t seed = 7;
  double train_fraction = 0.7;
  bool stratify_by_workload = false;
  std::size_t min_samples = 10;  // per platform
  unsigned threads = 0;          // 0: worker_threads()
};

struct PlatformModel {
  ForestModel forest;
  LinearModel linear;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  double forest_train_r2 = 0.0;
  double forest_validation_r2 = 0.0;
  double forest_validation_mre = 0.0;  // mean relative error vs labels
  double linear_validation_r2 = 0.0;
};

struct TrainedModels {
  std::map<Platform, PlatformModel> models;
  std::vector<Platform> missing;  // catalog platforms with no training data
  TrainOptions options;

  bool has(Platform p) const { return models.count(p) != 0; }
  const PlatformModel& at(Platform p) const;
};

// One forest (and one linear baseline) per platform present in `data`, each
// scored on its own validation split. Throws ConstraintError for an empty
// dataset or a platform with fewer than options.min_samples samples.
TrainedModels train_offline(const Dataset& data, const Catalog& catalog, const TrainOptions& options);
std::string training_report_json(const TrainedModels& trained);

// Content hash of the serialized model.
std::string model_version(const ForestModel& model);

struct ParameterChoice {
  std::string id;
  std::string name;
  std::string value;
  std::string label;
};

struct Recommendation {
  Platform platform = Platform::kHadoop;
  Workload workload = Workload::kSort;
  JointConfig config;
  std::string cloud_id;
  std::vector<ParameterChoice> parameters;
  double predicted_time = 0.0;  // seconds
  double predicted_cost = 0.0;
  std::string model_version;
  std::size_t evaluations = 0;
  std::uint64_t search_seed = 0;
  std::string trace_file;  // set by callers that export the trace
};

struct RecommendOutput {
  Recommendation recommendation;
  SearchTrace trace;
};

// Minimises predicted time with RRS over the encoded space. Cost is
// reported for the chosen configuration, not optimised. Throws when the
// model does not fit the space or the budget is below one exploration
// round.
RecommendOutput recommend(Platform platform, Workload workload, const ForestModel& model, const JointSpace& space,
                          const RRSParams& params, const PriceTable& prices);

Recommendation describe(Platform platform, Workload workload, const JointConfig& config, const JointSpace& space);

std::string recommendation_to_json(const Recommendation& rec);
Recommendation recommendation_from_json(std::string_view text, const Catalog& catalog);

// Where "true" execution times come from during evaluation.
class TruthSource {
 public:
  virtual ~TruthSource() = default;
  virtual double time(const JointConfig& config, Workload workload, const JointSpace& space) const = 0;
};

class OracleTruth final : public TruthSource {
 public:
  explicit OracleTruth(OracleSpec spec) : spec_(std::move(spec)) {}
  double time(const JointConfig& config, Workload workload, const JointSpace& space) const override;

 private:
  OracleSpec spec_;
};

// Looks runs up in a measured dataset, averaging repeated runs. Throws
// ConstraintError for a (config, workload) that was never measured.
class MeasuredTruth final : public TruthSource {
 public:
  explicit MeasuredTruth(const Dataset& data);
  double time(const JointConfig& config, Workload workload, const JointSpace& space) const override;

 private:
  struct Key {
    Platform platform;
    Workload workload;
    JointConfig config;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::pair<double, std::size_t>> runs_;
};

struct EvaluationRow {
  Platform platform = Platform::kHadoop;
  Workload workload = Workload::kSort;
  std::string baseline_cloud;
  double default_time = 0.0;
  double default_cost = 0.0;
  std::string tuned_cloud;
  double tuned_time = 0.0;
  double tuned_cost = 0.0;
  double time_reduction = 0.0;  // (default - tuned) / default
  double cost_reduction = 0.0;
};

struct PredictionCheck {
  Platform platform = Platform::kHadoop;
  Workload workload = Workload::kSort;
  double predicted = 0.0;
  double actual = 0.0;
  double relative_error = 0.0;
};

struct ReductionSummary {
  std::size_t rows = 0;
  double mean_time_reduction = 0.0;
  double mean_cost_reduction = 0.0;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;
  std::vector<PredictionCheck> predictions;
  std::map<Platform, ReductionSummary> per_platform;
  ReductionSummary overall;
  double mean_relative_error = 0.0;

  std::string to_json() const;
  std::string to_csv() const;
};

// Compares each recommendation against the all-default parameters on every
// cloud config of its platform.
EvaluationReport evaluate(const std::vector<Recommendation>& recommendations, const TruthSource& truth,
                          const Catalog& catalog, const PriceTable& prices);

}  // namespace cotune
