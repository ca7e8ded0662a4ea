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

// Joint search space of cloud cluster shapes and data-platform parameters,
// plus the unit-hypercube embedding the optimizer works in.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cotune/util.hpp"

namespace cotune {

enum class Platform { kHadoop, kSpark, kFlink };
inline constexpr std::array<Platform, 3> kAllPlatforms = {Platform::kHadoop, Platform::kSpark,
                                                          Platform::kFlink};

std::string_view to_string(Platform platform);
Platform parse_platform(std::string_view name);

// Canonical order Sort, WordCount, KMeans; the order fixes the one-hot
// layout in feature vectors.
enum class Workload { kSort, kWordCount, kKMeans };
inline constexpr std::array<Workload, 3> kAllWorkloads = {Workload::kSort, Workload::kWordCount,
                                                          Workload::kKMeans};

std::string_view to_string(Workload workload);
Workload parse_workload(std::string_view name);

// Domain position 0 is the platform default and is labelled "A"; positions
// 1.. are "B", "C", ...
std::string value_label(std::size_t index);
std::size_t parse_value_label(std::string_view label);

struct ParameterSpec {
  std::string id;
  std::string name;
  std::vector<std::string> domain;

  std::size_t size() const { return domain.size(); }
};

struct PlatformSpec {
  Platform platform = Platform::kHadoop;
  std::vector<ParameterSpec> parameters;

  // One default row plus one row per non-default value of each parameter.
  std::size_t ofat_grid_size() const;
  std::size_t parameter_index(std::string_view id) const;
};

struct NodeFlavor {
  std::string name;
  int vcpus = 0;
  double disk_gb = 0.0;
  double ram_gb = 0.0;
  double hourly_price = 0.0;
};

struct ResourceTotals {
  long vcpus = 0;
  double disk_gb = 0.0;
  double ram_gb = 0.0;

  bool operator==(const ResourceTotals&) const = default;
};

struct CloudConfig {
  std::string id;
  std::map<std::string, int> counts;  // flavor name -> node count

  int node_count() const;
  bool homogeneous() const;
};

struct CloudValidation {
  bool ok = false;
  ResourceTotals actual;
  std::string message;  // empty when ok

  explicit operator bool() const { return ok; }
};

// Sums the resources of `config` and compares them to `required`. Throws
// ConstraintError if a flavor in the config is not in `flavors`.
CloudValidation validate_cloud(const CloudConfig& config, const std::vector<NodeFlavor>& flavors,
                               const ResourceTotals& required);

// A concrete point of the joint space. `cloud` indexes the space's cloud
// list; `assignment[i]` indexes parameter i's domain.
struct JointConfig {
  std::size_t cloud = 0;
  std::vector<std::size_t> assignment;

  auto operator<=>(const JointConfig&) const = default;
};

struct UnitPoint {
  std::vector<double> coords;
};

// Cloud-derived quantities used as model features.
struct CloudShape {
  int nodes = 0;
  bool homogeneous = true;
  int max_vcpus = 0;
  int min_vcpus = 0;
};

// The search space for one platform: parameter domains crossed with the
// cloud catalog. Dimension 0 is the cloud, dimension i >= 1 is parameter
// i - 1.
class JointSpace {
 public:
  JointSpace(PlatformSpec platform, std::vector<CloudConfig> clouds, std::vector<NodeFlavor> flavors);

  const PlatformSpec& platform_spec() const { return platform_; }
  Platform platform() const { return platform_.platform; }
  const std::vector<CloudConfig>& clouds() const { return clouds_; }
  const std::vector<NodeFlavor>& flavors() const { return flavors_; }
  const CloudShape& cloud_shape(std::size_t cloud) const { return shapes_.at(cloud); }

  std::size_t dimension() const { return 1 + platform_.parameters.size(); }
  std::size_t parameter_count() const { return platform_.parameters.size(); }
  std::size_t domain_size(std::size_t dim) const;

  std::size_t cloud_index(std::string_view id) const;
  JointConfig default_config(std::size_t cloud) const;

  bool contains(const JointConfig& config) const;
  void check(const JointConfig& config) const;  // throws ConstraintError

  // "A;B;C;..." in canonical parameter order.
  std::string assignment_labels(const JointConfig& config) const;
  std::vector<std::size_t> parse_assignment(std::string_view labels) const;

 private:
  PlatformSpec platform_;
  std::vector<CloudConfig> clouds_;
  std::vector<NodeFlavor> flavors_;
  std::vector<CloudShape> shapes_;
};

UnitPoint encode(const JointConfig& config, const JointSpace& space);
JointConfig decode(const UnitPoint& point, const JointSpace& space);

// Number of joint configurations: clouds times the product of domain sizes.
std::uint64_t space_size(const JointSpace& space);

struct Catalog {
  std::vector<PlatformSpec> platforms;
  std::vector<NodeFlavor> flavors;
  std::vector<CloudConfig> clouds;
  ResourceTotals totals;

  const PlatformSpec& platform(Platform p) const;
  bool has_platform(Platform p) const;
  const NodeFlavor& flavor(std::string_view name) const;
  JointSpace space(Platform p) const;
};

// Parses and validates a catalog. ParseError for malformed documents,
// ConstraintError for invariant violations (names the offending entry).
Catalog parse_catalog(std::string_view json_text);
Catalog load_catalog(const std::string& path);

// The catalog compiled from data/catalog.json.
const Catalog& bundled_catalog();
std::string_view bundled_catalog_json();

}  // namespace cotune
