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

#include "cotune/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

namespace cotune {
namespace detail {
extern const std::string_view kBundledCatalogJson;
}  // namespace detail

namespace {

using nlohmann::json;

std::string totals_string(const ResourceTotals& t) {
  return "(" + std::to_string(t.vcpus) + " vCPU, " + format_double(t.disk_gb) + " GB disk, " +
         format_double(t.ram_gb) + " GB RAM)";
}

const json& require(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) {
    throw ParseError("catalog: " + where + " is missing \"" + key + "\"");
  }
  return node.at(key);
}

}  // namespace

std::string_view to_string(Platform platform) {
  switch (platform) {
    case Platform::kHadoop: return "Hadoop";
    case Platform::kSpark: return "Spark";
    case Platform::kFlink: return "Flink";
  }
  return "?";
}

Platform parse_platform(std::string_view name) {
  for (const Platform p : kAllPlatforms) {
    if (to_string(p) == name) return p;
  }
  throw ParseError("unknown platform '" + std::string(name) + "'");
}

std::string_view to_string(Workload workload) {
  switch (workload) {
    case Workload::kSort: return "Sort";
    case Workload::kWordCount: return "WordCount";
    case Workload::kKMeans: return "KMeans";
  }
  return "?";
}

Workload parse_workload(std::string_view name) {
  for (const Workload w : kAllWorkloads) {
    if (to_string(w) == name) return w;
  }
  throw ParseError("unknown workload '" + std::string(name) + "'");
}

std::string value_label(std::size_t index) {
  if (index >= 26) throw ConstraintError("domain index " + std::to_string(index) + " has no label");
  return std::string(1, static_cast<char>('A' + index));
}

std::size_t parse_value_label(std::string_view label) {
  if (label.size() != 1 || label[0] < 'A' || label[0] > 'Z') {
    throw ParseError("bad value label '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(label[0] - 'A');
}

std::size_t PlatformSpec::ofat_grid_size() const {
  std::size_t rows = 1;
  for (const auto& p : parameters) rows += p.size() - 1;
  return rows;
}

std::size_t PlatformSpec::parameter_index(std::string_view id) const {
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    if (parameters[i].id == id) return i;
  }
  throw ParseError("unknown parameter '" + std::string(id) + "' for " +
                   std::string(to_string(platform)));
}

int CloudConfig::node_count() const {
  int n = 0;
  for (const auto& [name, count] : counts) n += count;
  return n;
}

bool CloudConfig::homogeneous() const {
  return std::count_if(counts.begin(), counts.end(), [](const auto& kv) { return kv.second > 0; }) == 1;
}

CloudValidation validate_cloud(const CloudConfig& config, const std::vector<NodeFlavor>& flavors,
                               const ResourceTotals& required) {
  CloudValidation result;
  for (const auto& [name, count] : config.counts) {
    const auto it = std::find_if(flavors.begin(), flavors.end(),
                                 [&](const NodeFlavor& f) { return f.name == name; });
    if (it == flavors.end()) {
      throw ConstraintError("cloud " + config.id + ": unknown flavor '" + name + "'");
    }
    result.actual.vcpus += static_cast<long>(count) * it->vcpus;
    result.actual.disk_gb += count * it->disk_gb;
    result.actual.ram_gb += count * it->ram_gb;
  }
  result.ok = result.actual == required;
  if (!result.ok) {
    std::string msg = "cloud " + config.id + ": totals " + totals_string(result.actual) +
                      " != required " + totals_string(required);
    if (result.actual.vcpus != required.vcpus) {
      msg += "; vCPU total " + std::to_string(result.actual.vcpus) + " != " +
             std::to_string(required.vcpus);
    }
    result.message = std::move(msg);
  }
  return result;
}

JointSpace::JointSpace(PlatformSpec platform, std::vector<CloudConfig> clouds,
                       std::vector<NodeFlavor> flavors)
    : platform_(std::move(platform)), clouds_(std::move(clouds)), flavors_(std::move(flavors)) {
  if (clouds_.empty()) throw ConstraintError("joint space needs at least one cloud config");
  for (const auto& p : platform_.parameters) {
    if (p.domain.empty()) throw ConstraintError("parameter " + p.id + " has an empty domain");
  }
  shapes_.reserve(clouds_.size());
  for (const auto& cloud : clouds_) {
    CloudShape shape;
    shape.max_vcpus = 0;
    shape.min_vcpus = std::numeric_limits<int>::max();
    for (const auto& [name, count] : cloud.counts) {
      if (count <= 0) continue;
      const auto it = std::find_if(flavors_.begin(), flavors_.end(),
                                   [&](const NodeFlavor& f) { return f.name == name; });
      if (it == flavors_.end()) {
        throw ConstraintError("cloud " + cloud.id + ": unknown flavor '" + name + "'");
      }
      shape.nodes += count;
      shape.max_vcpus = std::max(shape.max_vcpus, it->vcpus);
      shape.min_vcpus = std::min(shape.min_vcpus, it->vcpus);
    }
    if (shape.nodes == 0) throw ConstraintError("cloud " + cloud.id + " has no nodes");
    shape.homogeneous = cloud.homogeneous();
    shapes_.push_back(shape);
  }
}

std::size_t JointSpace::domain_size(std::size_t dim) const {
  if (dim == 0) return clouds_.size();
  return platform_.parameters.at(dim - 1).size();
}

std::size_t JointSpace::cloud_index(std::string_view id) const {
  for (std::size_t i = 0; i < clouds_.size(); ++i) {
    if (clouds_[i].id == id) return i;
  }
  throw ParseError("unknown cloud config '" + std::string(id) + "'");
}

JointConfig JointSpace::default_config(std::size_t cloud) const {
  if (cloud >= clouds_.size()) throw ConstraintError("cloud index out of range");
  return JointConfig{cloud, std::vector<std::size_t>(parameter_count(), 0)};
}

bool JointSpace::contains(const JointConfig& config) const {
  if (config.cloud >= clouds_.size()) return false;
  if (config.assignment.size() != parameter_count()) return false;
  for (std::size_t i = 0; i < config.assignment.size(); ++i) {
    if (config.assignment[i] >= platform_.parameters[i].size()) return false;
  }
  return true;
}

void JointSpace::check(const JointConfig& config) const {
  if (config.cloud >= clouds_.size()) {
    throw ConstraintError("cloud index " + std::to_string(config.cloud) + " out of range");
  }
  if (config.assignment.size() != parameter_count()) {
    throw ConstraintError(std::string(to_string(platform())) + " expects " +
                          std::to_string(parameter_count()) + " parameter values, got " +
                          std::to_string(config.assignment.size()));
  }
  for (std::size_t i = 0; i < config.assignment.size(); ++i) {
    const auto& p = platform_.parameters[i];
    if (config.assignment[i] >= p.size()) {
      throw ConstraintError("parameter " + p.id + ": value index " +
                            std::to_string(config.assignment[i]) + " outside domain of size " +
                            std::to_string(p.size()));
    }
  }
}

std::string JointSpace::assignment_labels(const JointConfig& config) const {
  std::string out;
  for (std::size_t i = 0; i < config.assignment.size(); ++i) {
    if (i > 0) out += ';';
    out += value_label(config.assignment[i]);
  }
  return out;
}

std::vector<std::size_t> JointSpace::parse_assignment(std::string_view labels) const {
  std::vector<std::size_t> out;
  if (!labels.empty()) {
    std::size_t start = 0;
    for (;;) {
      const std::size_t end = labels.find(';', start);
      out.push_back(parse_value_label(labels.substr(start, end - start)));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }
  if (out.size() != parameter_count()) {
    throw ParseError("assignment '" + std::string(labels) + "' has " + std::to_string(out.size()) +
                     " values, " + std::string(to_string(platform())) + " has " +
                     std::to_string(parameter_count()) + " parameters");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] >= platform_.parameters[i].size()) {
      throw ParseError("parameter " + platform_.parameters[i].id + " has no value '" +
                       value_label(out[i]) + "'");
    }
  }
  return out;
}

UnitPoint encode(const JointConfig& config, const JointSpace& space) {
  space.check(config);
  UnitPoint point;
  point.coords.reserve(space.dimension());
  const auto center = [](std::size_t k, std::size_t bins) {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(bins);
  };
  point.coords.push_back(center(config.cloud, space.domain_size(0)));
  for (std::size_t i = 0; i < config.assignment.size(); ++i) {
    point.coords.push_back(center(config.assignment[i], space.domain_size(i + 1)));
  }
  return point;
}

JointConfig decode(const UnitPoint& point, const JointSpace& space) {
  if (point.coords.size() != space.dimension()) {
    throw ConstraintError("point has dimension " + std::to_string(point.coords.size()) +
                          ", space has " + std::to_string(space.dimension()));
  }
  const auto bin = [](double coord, std::size_t bins) -> std::size_t {
    const double scaled = std::floor(coord * static_cast<double>(bins));
    if (!(scaled > 0.0)) return 0;  // also maps NaN and negatives to the bottom bin
    return std::min(static_cast<std::size_t>(scaled), bins - 1);
  };
  JointConfig config;
  config.cloud = bin(point.coords[0], space.domain_size(0));
  config.assignment.resize(space.parameter_count());
  for (std::size_t i = 0; i < config.assignment.size(); ++i) {
    config.assignment[i] = bin(point.coords[i + 1], space.domain_size(i + 1));
  }
  return config;
}

std::uint64_t space_size(const JointSpace& space) {
  std::uint64_t n = space.clouds().size();
  for (const auto& p : space.platform_spec().parameters) n *= p.size();
  return n;
}

const PlatformSpec& Catalog::platform(Platform p) const {
  for (const auto& spec : platforms) {
    if (spec.platform == p) return spec;
  }
  throw ConstraintError("catalog has no platform " + std::string(to_string(p)));
}

bool Catalog::has_platform(Platform p) const {
  return std::any_of(platforms.begin(), platforms.end(),
                     [p](const PlatformSpec& s) { return s.platform == p; });
}

const NodeFlavor& Catalog::flavor(std::string_view name) const {
  for (const auto& f : flavors) {
    if (f.name == name) return f;
  }
  throw ConstraintError("catalog has no flavor '" + std::string(name) + "'");
}

JointSpace Catalog::space(Platform p) const { return JointSpace(platform(p), clouds, flavors); }

Catalog parse_catalog(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }

  Catalog catalog;
  try {
    for (const auto& jp : require(doc, "platforms", "document")) {
      PlatformSpec spec;
      spec.platform = parse_platform(require(jp, "name", "platform").get<std::string>());
      if (catalog.has_platform(spec.platform)) {
        throw ConstraintError("catalog: duplicate platform " + std::string(to_string(spec.platform)));
      }
      std::set<std::string> ids;
      for (const auto& jparam : require(jp, "parameters", "platform")) {
        ParameterSpec param;
        param.id = require(jparam, "id", "parameter").get<std::string>();
        param.name = require(jparam, "name", "parameter " + param.id).get<std::string>();
        param.domain = require(jparam, "domain", "parameter " + param.id).get<std::vector<std::string>>();
        if (param.domain.empty()) throw ConstraintError("parameter " + param.id + ": empty domain");
        if (std::set<std::string>(param.domain.begin(), param.domain.end()).size() !=
            param.domain.size()) {
          throw ConstraintError("parameter " + param.id + ": duplicate domain values");
        }
        if (!ids.insert(param.id).second) {
          throw ConstraintError("platform " + std::string(to_string(spec.platform)) +
                                ": duplicate parameter id " + param.id);
        }
        spec.parameters.push_back(std::move(param));
      }
      catalog.platforms.push_back(std::move(spec));
    }

    for (const auto& jf : require(doc, "flavors", "document")) {
      NodeFlavor f;
      f.name = require(jf, "name", "flavor").get<std::string>();
      f.vcpus = require(jf, "vcpus", "flavor " + f.name).get<int>();
      f.disk_gb = require(jf, "disk_gb", "flavor " + f.name).get<double>();
      f.ram_gb = require(jf, "ram_gb", "flavor " + f.name).get<double>();
      f.hourly_price = require(jf, "hourly_price", "flavor " + f.name).get<double>();
      if (f.vcpus < 1 || !(f.disk_gb > 0) || !(f.ram_gb > 0) || !(f.hourly_price >= 0)) {
        throw ConstraintError("flavor " + f.name + ": resources must be positive and price non-negative");
      }
      for (const auto& other : catalog.flavors) {
        if (other.name == f.name) throw ConstraintError("duplicate flavor " + f.name);
      }
      catalog.flavors.push_back(std::move(f));
    }

    const auto& jt = require(doc, "totals", "document");
    catalog.totals.vcpus = require(jt, "vcpus", "totals").get<long>();
    catalog.totals.disk_gb = require(jt, "disk_gb", "totals").get<double>();
    catalog.totals.ram_gb = require(jt, "ram_gb", "totals").get<double>();

    for (const auto& jc : require(doc, "clouds", "document")) {
      CloudConfig cloud;
      cloud.id = require(jc, "id", "cloud").get<std::string>();
      cloud.counts = require(jc, "counts", "cloud " + cloud.id).get<std::map<std::string, int>>();
      for (const auto& [name, count] : cloud.counts) {
        if (count < 0) throw ConstraintError("cloud " + cloud.id + ": negative count for " + name);
      }
      if (cloud.node_count() < 1) throw ConstraintError("cloud " + cloud.id + " has no nodes");
      for (const auto& other : catalog.clouds) {
        if (other.id == cloud.id) throw ConstraintError("duplicate cloud id " + cloud.id);
      }
      const auto check = validate_cloud(cloud, catalog.flavors, catalog.totals);
      if (!check) throw ConstraintError("catalog: " + check.message);
      catalog.clouds.push_back(std::move(cloud));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }
  if (catalog.clouds.empty()) throw ConstraintError("catalog: no cloud configs");
  return catalog;
}

Catalog load_catalog(const std::string& path) { return parse_catalog(read_file(path)); }

std::string_view bundled_catalog_json() { return detail::kBundledCatalogJson; }

const Catalog& bundled_catalog() {
  static const Catalog catalog = parse_catalog(detail::kBundledCatalogJson);
  return catalog;
}

}  // namespace cotune
