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

#include "cotune/rrs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cotune {
namespace {

constexpr double kBelowOne = 0x1.fffffffffffffp-1;  // largest double < 1

class Search {
 public:
  Search(const UnitObjective& objective, std::size_t dim, const RRSParams& params)
      : objective_(objective), dim_(dim), params_(params), rng_(params.seed) {}

  RRSResult run() {
    const std::size_t n = params_.explore_samples();

    // First round: n uniform draws, then exploit around the best of them.
    std::size_t round_best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (exhausted()) {
        result_.partial = true;
        return finish();
      }
      const auto& e = evaluate(uniform_point(), SearchPhase::kExplore);
      explore_values_.push_back(e.value);
      if (e.value < result_.trace.entries[round_best].value) round_best = e.index;
    }
    exploit(result_.trace.entries[round_best].point, result_.trace.entries[round_best].value);

    // Afterwards keep exploring; a draw that beats the running
    // r-percentile of all exploration samples seeds a new exploit.
    while (!exhausted()) {
      const double threshold = explore_threshold();
      const auto& e = evaluate(uniform_point(), SearchPhase::kExplore);
      explore_values_.push_back(e.value);
      if (e.value < threshold) {
        const UnitPoint start = e.point;
        exploit(start, e.value);
      }
    }
    return finish();
  }

 private:
  bool exhausted() const { return result_.trace.size() >= params_.eval_budget; }

  UnitPoint uniform_point() {
    UnitPoint p;
    p.coords.resize(dim_);
    for (auto& c : p.coords) c = rng_.uniform();
    return p;
  }

  const TraceEntry& evaluate(UnitPoint point, SearchPhase phase) {
    TraceEntry e;
    e.index = result_.trace.size();
    e.value = objective_(point);
    e.point = std::move(point);
    e.phase = phase;
    if (e.index == 0 || e.value < result_.best_value) {
      result_.best_value = e.value;
      result_.best_point = e.point;
    }
    e.best_so_far = result_.best_value;
    result_.trace.entries.push_back(std::move(e));
    return result_.trace.entries.back();
  }

  double explore_threshold() const {
    std::vector<double> sorted = explore_values_;
    std::sort(sorted.begin(), sorted.end());
    const auto k = static_cast<std::size_t>(
        std::ceil(params_.explore_percentile * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(k, 1, sorted.size()) - 1];
  }

  // Move-or-shrink around `center`. The box starts with volume r; an
  // improving sample re-centers it, l consecutive misses shrink its edge by
  // c, and it is abandoned once the edge drops below min_box_edge.
  void exploit(UnitPoint center, double center_value) {
    const std::size_t l = params_.resolved_exploit_samples();
    double edge = std::pow(params_.explore_percentile, 1.0 / static_cast<double>(dim_));
    bool shrunk = false;
    std::size_t misses = 0;
    while (edge >= params_.min_box_edge && !exhausted()) {
      UnitPoint p;
      p.coords.resize(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        const double lo = std::max(0.0, center.coords[i] - 0.5 * edge);
        const double hi = std::min(1.0, center.coords[i] + 0.5 * edge);
        p.coords[i] = std::min(lo + rng_.uniform() * (hi - lo), kBelowOne);
      }
      const auto& e = evaluate(std::move(p), shrunk ? SearchPhase::kExploitShrink
                                                    : SearchPhase::kExploitRealign);
      if (e.value < center_value) {
        center = e.point;
        center_value = e.value;
        shrunk = false;
        misses = 0;
      } else if (++misses >= l) {
        edge *= params_.shrink_ratio;
        shrunk = true;
        misses = 0;
      }
    }
  }

  RRSResult finish() { return std::move(result_); }

  const UnitObjective& objective_;
  std::size_t dim_;
  const RRSParams& params_;
  Rng rng_;
  std::vector<double> explore_values_;
  RRSResult result_;
};

// Odometer step with the last parameter fastest, i.e. lexicographic order.
// Returns false after the last assignment.
bool advance(JointConfig& config, const JointSpace& space) {
  for (std::size_t i = config.assignment.size(); i > 0; --i) {
    if (++config.assignment[i - 1] < space.domain_size(i)) return true;
    config.assignment[i - 1] = 0;
  }
  return false;
}

}  // namespace

std::string_view to_string(SearchPhase phase) {
  switch (phase) {
    case SearchPhase::kExplore: return "explore";
    case SearchPhase::kExploitRealign: return "exploit-realign";
    case SearchPhase::kExploitShrink: return "exploit-shrink";
  }
  return "?";
}

std::size_t RRSParams::explore_samples() const {
  return static_cast<std::size_t>(std::ceil(std::log(1.0 - confidence) / std::log(1.0 - explore_percentile)));
}

std::size_t RRSParams::resolved_exploit_samples() const {
  return exploit_samples == 0 ? explore_samples() : exploit_samples;
}

void RRSParams::validate_ranges() const {
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConstraintError("RRS: confidence p must lie in (0, 1)");
  if (!(exploit_percentile > 0.0 && exploit_percentile <= explore_percentile && explore_percentile < 1.0)) {
    throw ConstraintError("RRS: percentiles must satisfy 0 < q <= r < 1");
  }
  if (!(shrink_ratio > 0.0 && shrink_ratio < 1.0)) throw ConstraintError("RRS: shrink ratio c must lie in (0, 1)");
  if (!(min_box_edge > 0.0 && min_box_edge < 1.0)) throw ConstraintError("RRS: min box edge must lie in (0, 1)");
}

void RRSParams::validate() const {
  validate_ranges();
  if (eval_budget < explore_samples()) {
    throw ConstraintError("RRS: budget " + std::to_string(eval_budget) + " is smaller than one exploration round (" +
                          std::to_string(explore_samples()) + " samples)");
  }
}

std::string SearchTrace::to_csv() const {
  std::string out = "eval_index,phase,objective,best_so_far\n";
  for (const auto& e : entries) {
    out += std::to_string(e.index);
    out += ',';
    out += to_string(e.phase);
    out += ',';
    out += format_double(e.value);
    out += ',';
    out += format_double(e.best_so_far);
    out += '\n';
  }
  return out;
}

RRSResult rrs_minimize(const UnitObjective& objective, std::size_t dim, const RRSParams& params) {
  if (dim == 0) throw ConstraintError("RRS: dimension must be positive");
  params.validate_ranges();
  if (params.eval_budget == 0) throw ConstraintError("RRS: budget must be positive");
  Search search(objective, dim, params);
  return search.run();
}

BruteForceResult brute_force_min(const ConfigObjective& objective, const JointSpace& space, std::uint64_t cap) {
  const std::uint64_t total = space_size(space);
  if (total > cap) {
    throw ConstraintError("space of " + std::to_string(total) + " configurations exceeds the brute-force cap of " +
                          std::to_string(cap));
  }
  BruteForceResult result;
  result.value = std::numeric_limits<double>::infinity();
  JointConfig config = space.default_config(0);
  for (std::size_t cloud = 0; cloud < space.clouds().size(); ++cloud) {
    config.cloud = cloud;
    std::fill(config.assignment.begin(), config.assignment.end(), 0);
    do {
      const double v = objective(config);
      ++result.evaluated;
      if (result.evaluated == 1 || v < result.value) {
        result.value = v;
        result.best = config;
      }
    } while (advance(config, space));
  }
  return result;
}

}  // namespace cotune
