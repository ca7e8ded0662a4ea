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

// Recursive Random Search over [0, 1)^d, and an exhaustive enumerator that
// gives the exact optimum of small joint spaces.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cotune/configspace.hpp"

namespace cotune {

enum class SearchPhase { kExplore, kExploitRealign, kExploitShrink };
std::string_view to_string(SearchPhase phase);

struct RRSParams {
  double confidence = 0.99;          // p
  double explore_percentile = 0.1;   // r
  double exploit_percentile = 0.01;  // q
  double shrink_ratio = 0.5;         // c
  std::size_t exploit_samples = 0;   // l; 0 selects explore_samples()
  // An exploit box is abandoned once its edge, as a fraction of the unit
  // edge, falls below this value.
  double min_box_edge = 1e-4;
  std::size_t eval_budget = 2000;
  std::uint64_t seed = 0;

  // n = ceil(ln(1 - p) / ln(1 - r)): uniform draws needed so that, with
  // confidence p, at least one lands in the best r-fraction of the space.
  std::size_t explore_samples() const;
  std::size_t resolved_exploit_samples() const;

  // 0 < q <= r < 1, 0 < c < 1, 0 < p < 1.
  void validate_ranges() const;
  // validate_ranges() plus eval_budget >= n.
  void validate() const;
};

struct TraceEntry {
  std::size_t index = 0;
  UnitPoint point;
  double value = 0.0;
  SearchPhase phase = SearchPhase::kExplore;
  double best_so_far = 0.0;
};

struct SearchTrace {
  std::vector<TraceEntry> entries;

  std::size_t size() const { return entries.size(); }
  // eval_index,phase,objective,best_so_far
  std::string to_csv() const;
};

struct RRSResult {
  UnitPoint best_point;
  double best_value = 0.0;
  SearchTrace trace;
  // Set when the budget ran out before the first exploration round of n
  // samples completed; the result is then the best of the partial round.
  bool partial = false;
};

using UnitObjective = std::function<double(const UnitPoint&)>;

// Parameter ranges are validated; a budget below n is allowed here and
// yields a partial result (callers that need a full round check
// RRSParams::validate).
RRSResult rrs_minimize(const UnitObjective& objective, std::size_t dim, const RRSParams& params);

inline constexpr std::uint64_t kBruteForceCap = 1'000'000;

struct BruteForceResult {
  JointConfig best;
  double value = 0.0;
  std::uint64_t evaluated = 0;
};

using ConfigObjective = std::function<double(const JointConfig&)>;

// Exact minimum over every configuration of `space`, ties going to the
// lowest cloud index and then the lexicographically smallest assignment.
// Throws ConstraintError when space_size(space) exceeds `cap`.
BruteForceResult brute_force_min(const ConfigObjective& objective, const JointSpace& space,
                                 std::uint64_t cap = kBruteForceCap);

}  // namespace cotune
