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

#include "cotune/surrogate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace cotune {
namespace {

using nlohmann::json;

// Row-major design matrix plus labels for one platform.
struct Design {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<double> y;

  double at(std::size_t r, std::size_t c) const { return x[r * cols + c]; }
};

Design build_design(const Dataset& data, const JointSpace& space) {
  Design d;
  d.rows = data.size();
  d.cols = kWorkloadFeatures + kCloudFeatures + space.parameter_count();
  d.x.reserve(d.rows * d.cols);
  d.y.reserve(d.rows);
  for (const auto& s : data.samples) {
    if (s.platform != space.platform()) {
      throw ConstraintError("training data mixes platforms: found " + std::string(to_string(s.platform)) +
                            " in a " + std::string(to_string(space.platform())) + " dataset");
    }
    const auto f = featurize(s, space);
    d.x.insert(d.x.end(), f.begin(), f.end());
    d.y.push_back(s.exec_time);
  }
  return d;
}

class TreeBuilder {
 public:
  TreeBuilder(const Design& design, const ForestHyper& hyper, int features_per_split, Rng& rng)
      : design_(design), hyper_(hyper), features_per_split_(features_per_split), rng_(rng) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    tree_.nodes.clear();
    grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  int grow(std::size_t begin, std::size_t end, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t m = end - begin;

    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i) {
      const double y = design_.y[rows_[i]];
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    tree_.nodes[id].value = sum / static_cast<double>(m);
    tree_.nodes[id].samples = static_cast<int>(m);

    const auto min_leaf = static_cast<std::size_t>(hyper_.min_samples_leaf);
    if (depth >= hyper_.max_depth || m < 2 * min_leaf || lo == hi) return id;

    const Split best = find_split(begin, end);
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto mid = std::stable_partition(
        rows_.begin() + static_cast<long>(begin), rows_.begin() + static_cast<long>(end),
        [&](std::size_t r) { return design_.at(r, f) <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid - rows_.begin());

    tree_.nodes[id].feature = best.feature;
    tree_.nodes[id].threshold = best.threshold;
    const int left = grow(begin, split_at, depth + 1);
    tree_.nodes[id].left = left;
    const int right = grow(split_at, end, depth + 1);
    tree_.nodes[id].right = right;
    return id;
  }

  bool constant_in_node(std::size_t f, std::size_t begin, std::size_t end) const {
    const double first = design_.at(rows_[begin], f);
    for (std::size_t i = begin + 1; i < end; ++i) {
      if (design_.at(rows_[i], f) != first) return false;
    }
    return true;
  }

  // Draws features in random order until features_per_split of them vary
  // within the node, then scans those in ascending index order so that
  // ties resolve to the lowest feature, then the lowest threshold.
  Split find_split(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> order(design_.cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < order.size() && candidates.size() < static_cast<std::size_t>(features_per_split_); ++i) {
      const std::size_t j = i + rng_.below(order.size() - i);
      std::swap(order[i], order[j]);
      if (!constant_in_node(order[i], begin, end)) candidates.push_back(order[i]);
    }
    std::sort(candidates.begin(), candidates.end());

    const std::size_t m = end - begin;
    const auto min_leaf = static_cast<std::size_t>(hyper_.min_samples_leaf);
    std::vector<std::pair<double, double>> column(m);  // (feature value, label)
    Split best;
    for (const std::size_t f : candidates) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = rows_[begin + i];
        column[i] = {design_.at(r, f), design_.y[r]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double total = 0.0;
      for (const auto& [v, y] : column) total += y;
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        left_sum += column[i].second;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = m - n_left;
        if (column[i].first == column[i + 1].first) continue;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        // Minimising the children's summed squared error is the same as
        // maximising sum_l^2 / n_l + sum_r^2 / n_r.
        const double right_sum = total - left_sum;
        const double score = left_sum * left_sum / static_cast<double>(n_left) +
                             right_sum * right_sum / static_cast<double>(n_right);
        if (score > best.score) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (column[i].first + column[i + 1].first);
          best.score = score;
        }
      }
    }
    return best;
  }

  const Design& design_;
  const ForestHyper& hyper_;
  int features_per_split_;
  Rng& rng_;
  std::vector<std::size_t> rows_;
  RegressionTree tree_;
};

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value, n.samples}));
  }
  return nodes;
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree tree;
  for (const auto& jn : j) {
    if (!jn.is_array() || jn.size() != 6) throw ParseError("model: tree node must have 6 fields");
    TreeNode n;
    n.feature = jn[0].get<int>();
    n.threshold = jn[1].get<double>();
    n.left = jn[2].get<int>();
    n.right = jn[3].get<int>();
    n.value = jn[4].get<double>();
    n.samples = jn[5].get<int>();
    tree.nodes.push_back(n);
  }
  const int count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw ParseError("model: empty tree");
  for (int i = 0; i < count; ++i) {
    const auto& n = tree.nodes[static_cast<std::size_t>(i)];
    if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= count || n.right >= count)) {
      throw ParseError("model: tree node " + std::to_string(i) + " has invalid children");
    }
  }
  return tree;
}

json metric_to_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double metric_from_json(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::vector<std::string> feature_names(const JointSpace& space) {
  std::vector<std::string> names;
  for (const Workload w : kAllWorkloads) names.push_back("workload=" + std::string(to_string(w)));
  names.insert(names.end(), {"num_nodes", "homogeneous", "max_node_vcpus", "min_node_vcpus"});
  for (const auto& p : space.platform_spec().parameters) names.push_back(p.id);
  return names;
}

std::vector<double> featurize(const JointConfig& config, Workload workload, const JointSpace& space) {
  space.check(config);
  std::vector<double> f;
  f.reserve(kWorkloadFeatures + kCloudFeatures + config.assignment.size());
  for (const Workload w : kAllWorkloads) f.push_back(w == workload ? 1.0 : 0.0);
  const CloudShape& shape = space.cloud_shape(config.cloud);
  f.push_back(shape.nodes);
  f.push_back(shape.homogeneous ? 1.0 : 0.0);
  f.push_back(shape.max_vcpus);
  f.push_back(shape.min_vcpus);
  for (const auto idx : config.assignment) f.push_back(static_cast<double>(idx));
  return f;
}

std::vector<double> featurize(const TrainingSample& sample, const JointSpace& space) {
  if (sample.platform != space.platform()) throw ConstraintError("sample platform does not match space");
  return featurize(sample.config, sample.workload, space);
}

void ForestHyper::validate() const {
  if (n_trees <= 0) throw ConstraintError("n_trees must be positive");
  if (max_depth <= 0) throw ConstraintError("max_depth must be positive");
  if (min_samples_leaf <= 0) throw ConstraintError("min_samples_leaf must be positive");
  if (features_per_split < 0) throw ConstraintError("features_per_split must be positive (or 0 for auto)");
}

int ForestHyper::resolved_features_per_split(std::size_t n_features) const {
  const int d = static_cast<int>(n_features);
  if (features_per_split == 0) return std::max(1, (d + 2) / 3);
  return std::min(features_per_split, d);
}

double RegressionTree::predict(std::span<const double> features) const {
  std::size_t i = 0;
  for (;;) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) return n.value;
    i = static_cast<std::size_t>(features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
}

double ForestModel::predict_raw(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

double ForestModel::predict(const JointConfig& config, Workload workload, const JointSpace& space) const {
  if (space.platform() != platform) {
    throw ConstraintError("model is for " + std::string(to_string(platform)) + ", config is for " +
                          std::string(to_string(space.platform())));
  }
  const auto x = featurize(config, workload, space);
  return std::max(kMinPredictedSeconds, predict_raw(x));
}

ForestModel fit_forest(const Dataset& train, const JointSpace& space, const ForestHyper& hyper,
                       std::uint64_t seed, unsigned threads) {
  hyper.validate();
  if (train.empty()) throw ConstraintError("cannot fit a forest on an empty dataset");
  const Design design = build_design(train, space);
  const int k = hyper.resolved_features_per_split(design.cols);

  ForestModel model;
  model.platform = space.platform();
  model.hyper = hyper;
  model.hyper.features_per_split = k;
  model.seed = seed;
  model.features = feature_names(space);
  model.trees.resize(static_cast<std::size_t>(hyper.n_trees));

  const auto grow_one = [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> rows(design.rows);
    if (hyper.bootstrap) {
      for (auto& r : rows) r = rng.below(design.rows);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    TreeBuilder builder(design, hyper, k, rng);
    model.trees[t] = builder.build(std::move(rows));
  };

  const unsigned workers = std::min<unsigned>(threads == 0 ? worker_threads() : threads,
                                              static_cast<unsigned>(hyper.n_trees));
  if (workers <= 1) {
    for (std::size_t t = 0; t < model.trees.size(); ++t) grow_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < model.trees.size(); t = next++) grow_one(t);
      });
    }
  }

  std::vector<double> fitted(design.rows);
  for (std::size_t r = 0; r < design.rows; ++r) {
    fitted[r] = std::max(kMinPredictedSeconds,
                         model.predict_raw(std::span<const double>(design.x).subspan(r * design.cols, design.cols)));
  }
  model.train_r2 = r2_score(fitted, design.y);
  return model;
}

double LinearModel::predict_raw(std::span<const double> x) const {
  double v = intercept;
  for (std::size_t i = 0; i < weights.size(); ++i) v += weights[i] * x[i];
  return v;
}

double LinearModel::predict(const JointConfig& config, Workload workload, const JointSpace& space) const {
  if (space.platform() != platform) throw ConstraintError("linear model platform mismatch");
  return std::max(kMinPredictedSeconds, predict_raw(featurize(config, workload, space)));
}

LinearModel fit_linear(const Dataset& train, const JointSpace& space) {
  if (train.empty()) throw ConstraintError("cannot fit a linear model on an empty dataset");
  const Design design = build_design(train, space);
  const auto n = static_cast<Eigen::Index>(design.rows);
  const auto p = static_cast<Eigen::Index>(design.cols + 1);  // last column is the intercept

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c + 1 < p; ++c) {
      x(r, c) = design.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    x(r, p - 1) = 1.0;
    y(r) = design.y[static_cast<std::size_t>(r)];
  }

  Eigen::VectorXd beta;
  if (n < p) {
    beta = x.completeOrthogonalDecomposition().solve(y);
  } else {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += 1e-8;
    beta = gram.ldlt().solve(x.transpose() * y);
  }

  LinearModel model;
  model.platform = space.platform();
  model.features = feature_names(space);
  model.weights.assign(beta.data(), beta.data() + (p - 1));
  model.intercept = beta(p - 1);
  return model;
}

std::vector<double> predict_all(const ForestModel& model, const Dataset& data, const JointSpace& space) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(model.predict(s.config, s.workload, space));
  return out;
}

double evaluate(const ForestModel& model, const Dataset& data, const JointSpace& space) {
  return r2_score(predict_all(model, data, space), data.labels());
}

double evaluate(const LinearModel& model, const Dataset& data, const JointSpace& space) {
  std::vector<double> predicted;
  predicted.reserve(data.size());
  for (const auto& s : data.samples) predicted.push_back(model.predict(s.config, s.workload, space));
  return r2_score(predicted, data.labels());
}

void check_compatible(const ForestModel& model, const JointSpace& space) {
  if (model.platform != space.platform()) {
    throw ConstraintError("model is for " + std::string(to_string(model.platform)) + ", space is " +
                          std::string(to_string(space.platform())));
  }
  if (model.features != feature_names(space)) {
    throw ConstraintError("model feature layout does not match the catalog for " +
                          std::string(to_string(space.platform())));
  }
}

std::string forest_to_json(const ForestModel& model) {
  json j;
  j["format"] = kForestFormat;
  j["version"] = kForestFormatVersion;
  j["platform"] = to_string(model.platform);
  j["seed"] = model.seed;
  j["hyper"] = {{"n_trees", model.hyper.n_trees},
                {"max_depth", model.hyper.max_depth},
                {"min_samples_leaf", model.hyper.min_samples_leaf},
                {"features_per_split", model.hyper.features_per_split},
                {"bootstrap", model.hyper.bootstrap}};
  j["features"] = model.features;
  j["metrics"] = {{"train_r2", metric_to_json(model.train_r2)},
                  {"validation_r2", metric_to_json(model.validation_r2)}};
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

ForestModel forest_from_json(std::string_view text) {
  ForestModel model;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != kForestFormat) throw ParseError("model: not a cotune forest file");
    if (j.at("version").get<int>() != kForestFormatVersion) {
      throw ParseError("model: unsupported version " + j.at("version").dump());
    }
    model.platform = parse_platform(j.at("platform").get<std::string>());
    model.seed = j.at("seed").get<std::uint64_t>();
    const auto& h = j.at("hyper");
    model.hyper.n_trees = h.at("n_trees").get<int>();
    model.hyper.max_depth = h.at("max_depth").get<int>();
    model.hyper.min_samples_leaf = h.at("min_samples_leaf").get<int>();
    model.hyper.features_per_split = h.at("features_per_split").get<int>();
    model.hyper.bootstrap = h.at("bootstrap").get<bool>();
    model.features = j.at("features").get<std::vector<std::string>>();
    model.train_r2 = metric_from_json(j.at("metrics").at("train_r2"));
    model.validation_r2 = metric_from_json(j.at("metrics").at("validation_r2"));
    for (const auto& jt : j.at("trees")) {
      auto tree = tree_from_json(jt);
      for (const auto& n : tree.nodes) {
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= model.features.size()) {
          throw ParseError("model: split on unknown feature " + std::to_string(n.feature));
        }
      }
      model.trees.push_back(std::move(tree));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (model.trees.empty()) throw ParseError("model: no trees");
  return model;
}

}  // namespace cotune
