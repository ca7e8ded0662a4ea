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

// Labelled benchmark runs: CSV ingest/export, train/validation split and
// the R2 score used to report model accuracy.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotune/configspace.hpp"

namespace cotune {

struct TrainingSample {
  Platform platform = Platform::kHadoop;
  Workload workload = Workload::kSort;
  JointConfig config;
  double exec_time = 0.0;  // seconds
  std::size_t line = 0;    // source line, 0 when generated in memory
};

struct Dataset {
  std::vector<TrainingSample> samples;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  Dataset only(Platform platform) const;
  std::vector<Platform> platforms() const;  // in canonical order
  std::vector<double> labels() const;
};

inline constexpr std::string_view kCsvHeader = "platform,workload,cloud,assignment,exec_time_s";

// Every row is validated against `catalog`; errors carry the line number.
Dataset parse_csv(std::string_view text, const Catalog& catalog, std::string provenance = {});
Dataset load_csv(const std::string& path, const Catalog& catalog);

std::string to_csv(const Dataset& data, const Catalog& catalog);
void write_csv(const std::string& path, const Dataset& data, const Catalog& catalog);

struct SplitOptions {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  // Split each workload separately. Off by default: the reference split is
  // plain sample-level.
  bool stratify_by_workload = false;
};

struct DataSplit {
  Dataset train;
  Dataset validation;
};

// Deterministic given the options. The train side receives
// round(train_fraction * n) samples (per stratum when stratifying).
// Both sides keep the input order.
DataSplit split(const Dataset& data, const SplitOptions& options);

// 1 - SS_res / SS_tot. When the actual values are constant, returns 1 for a
// perfect fit and -infinity otherwise.
double r2_score(std::span<const double> predicted, std::span<const double> actual);

// Mean of |predicted - actual| / actual.
double mean_relative_error(std::span<const double> predicted, std::span<const double> actual);

}  // namespace cotune
