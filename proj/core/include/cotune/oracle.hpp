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

// Deterministic synthetic ground truth over the joint space. The surface is
// multiplicative:
//
//   time = base(platform, workload)
//        * cloud factor      (node-count trend, heterogeneity penalty)
//        * parameter factors (seeded main effect per non-default value)
//        * interaction       (parameter effects that depend on cloud shape)
//        * (1 + noise)       (seeded by the configuration itself)
//
// Hadoop gets faster with more nodes, Flink slower, Spark has a
// workload-specific preferred node count. Default parameter values are
// neutral, so a default configuration costs exactly base * cloud factor.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cotune/configspace.hpp"
#include "cotune/dataset.hpp"

namespace cotune {

struct OracleSpec {
  std::uint64_t seed = 2024;
  // Indexed [platform][workload] in canonical enum order.
  std::array<std::array<double, 3>, 3> base_seconds = {{
      {100.0, 190.0, 480.0},  // Hadoop
      {65.0, 118.0, 290.0},   // Spark
      {35.0, 60.0, 150.0},    // Flink
  }};
  double cloud_effect = 1.0;           // scales the node-count trend
  double heterogeneity_penalty = 0.10; // mixed-flavor clusters run this much longer
  double parameter_effect = 0.10;      // largest main effect of one parameter value
  double interaction = 0.06;           // cloud x parameter coupling
  double noise = 0.05;                 // std of the multiplicative noise

  double base(Platform p, Workload w) const;
  void validate() const;
};

OracleSpec parse_oracle_spec(std::string_view json_text);
OracleSpec load_oracle_spec(const std::string& path);
std::string oracle_spec_to_json(const OracleSpec& spec);

inline constexpr double kMinTrueSeconds = 1.0;

// Noise-free surface.
double expected_time(const OracleSpec& spec, const JointConfig& config, Workload workload,
                     const JointSpace& space);

// expected_time with the configuration-seeded noise applied, clamped at
// kMinTrueSeconds. A pure function of its arguments.
double true_time(const OracleSpec& spec, const JointConfig& config, Workload workload,
                 const JointSpace& space);

enum class GenerationMode { kOfat, kRandomK };
GenerationMode parse_generation_mode(std::string_view name);

// OFAT: for every cloud and workload, the all-default row followed by one
// row per non-default value of each parameter (clouds x grid x workloads
// rows). Random-k: k configurations drawn uniformly, each with a uniformly
// drawn workload.
Dataset gen_dataset(const OracleSpec& spec, const JointSpace& space, GenerationMode mode,
                    std::uint64_t seed, std::size_t k = 0);

// Concatenation over `platforms`, in the given order; random-k draws k rows
// per platform.
Dataset gen_dataset(const OracleSpec& spec, const Catalog& catalog, const std::vector<Platform>& platforms,
                    GenerationMode mode, std::uint64_t seed, std::size_t k = 0);

}  // namespace cotune
