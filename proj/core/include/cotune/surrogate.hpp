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

// Performance models mapping (cloud, parameters, workload) to execution
// time: a bagged CART regression forest and a least-squares baseline.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotune/configspace.hpp"
#include "cotune/dataset.hpp"

namespace cotune {

// Predictions are floored here so downstream cost and relative-error
// arithmetic never sees a non-positive time.
inline constexpr double kMinPredictedSeconds = 1e-3;

// Feature layout, fixed per platform (3 + 4 + parameter count):
//   [0..2]  workload one-hot in canonical order (Sort, WordCount, KMeans)
//   [3]     number of nodes
//   [4]     1 if all nodes share one flavor, else 0
//   [5]     largest node vCPU count
//   [6]     smallest node vCPU count
//   [7..]   domain index of each parameter, in catalog order
inline constexpr std::size_t kWorkloadFeatures = 3;
inline constexpr std::size_t kCloudFeatures = 4;

std::vector<std::string> feature_names(const JointSpace& space);
std::vector<double> featurize(const JointConfig& config, Workload workload, const JointSpace& space);
std::vector<double> featurize(const TrainingSample& sample, const JointSpace& space);

struct ForestHyper {
  int n_trees = 100;
  int max_depth = 12;
  int min_samples_leaf = 2;
  int features_per_split = 0;  // 0 selects ceil(d / 3)
  bool bootstrap = true;

  void validate() const;
  int resolved_features_per_split(std::size_t n_features) const;
};

// Split nodes send x[feature] <= threshold left. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  int samples = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> features) const;
  bool operator==(const RegressionTree&) const = default;
};

struct ForestModel {
  Platform platform = Platform::kHadoop;
  ForestHyper hyper;
  std::uint64_t seed = 0;
  std::vector<std::string> features;
  std::vector<RegressionTree> trees;
  double train_r2 = std::numeric_limits<double>::quiet_NaN();
  double validation_r2 = std::numeric_limits<double>::quiet_NaN();

  // Mean of the tree outputs, without the positivity floor.
  double predict_raw(std::span<const double> features) const;
  // Floored at kMinPredictedSeconds. Throws ConstraintError on a platform
  // mismatch.
  double predict(const JointConfig& config, Workload workload, const JointSpace& space) const;
};

// Grows hyper.n_trees trees. Tree t depends only on (seed, t), so the result
// is identical for any thread count; threads == 0 uses worker_threads().
ForestModel fit_forest(const Dataset& train, const JointSpace& space, const ForestHyper& hyper,
                       std::uint64_t seed, unsigned threads = 0);

struct LinearModel {
  Platform platform = Platform::kHadoop;
  std::vector<std::string> features;
  std::vector<double> weights;
  double intercept = 0.0;

  double predict_raw(std::span<const double> features) const;
  double predict(const JointConfig& config, Workload workload, const JointSpace& space) const;
};

// Least squares through the normal equations with a 1e-8 ridge jitter on
// the diagonal (the one-hot workload columns are collinear with the
// intercept). With fewer samples than unknowns the minimum-norm solution
// is returned instead.
LinearModel fit_linear(const Dataset& train, const JointSpace& space);

// R2 of the model's predictions on `data`.
double evaluate(const ForestModel& model, const Dataset& data, const JointSpace& space);
double evaluate(const LinearModel& model, const Dataset& data, const JointSpace& space);

std::vector<double> predict_all(const ForestModel& model, const Dataset& data, const JointSpace& space);

// Throws ConstraintError unless the model was trained on this space's
// platform and feature layout.
void check_compatible(const ForestModel& model, const JointSpace& space);

inline constexpr std::string_view kForestFormat = "cotune-forest";
inline constexpr int kForestFormatVersion = 1;

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(std::string_view text);

}  // namespace cotune
