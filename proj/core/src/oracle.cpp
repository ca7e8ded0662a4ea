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

#include "cotune/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace cotune {
namespace {

using nlohmann::json;

std::size_t index_of(Platform p) { return static_cast<std::size_t>(p); }
std::size_t index_of(Workload w) { return static_cast<std::size_t>(w); }

// Keyed uniform in [0, 1): every surface coefficient is a hash of the oracle
// seed and the coefficient's coordinates, so nothing is tabulated.
class Keyed {
 public:
  explicit Keyed(std::uint64_t seed) : h_(splitmix64(seed)) {}
  Keyed& with(std::uint64_t v) {
    h_ = splitmix64(h_ ^ splitmix64(v + 0x51ed2701ULL));
    return *this;
  }
  double uniform() const { return static_cast<double>(h_ >> 11) * 0x1.0p-53; }
  double symmetric() const { return 2.0 * uniform() - 1.0; }
  std::uint64_t bits() const { return h_; }

 private:
  std::uint64_t h_;
};

enum Tag : std::uint64_t { kMain = 1, kMainWorkload, kCoupleNodes, kCoupleSpread, kNoise };

double node_term(const OracleSpec& spec, Platform p, Workload w, int nodes) {
  const double n = nodes;
  switch (p) {
    case Platform::kHadoop: {
      static constexpr std::array<double, 3> kSlope = {0.06, 0.08, 0.10};
      return 1.0 - spec.cloud_effect * kSlope[index_of(w)] * (n - 3.0);
    }
    case Platform::kFlink: {
      // Convex growth from the 2-node minimum.
      static constexpr std::array<double, 3> kCurvature = {0.05, 0.04, 0.035};
      return 1.0 + spec.cloud_effect * kCurvature[index_of(w)] * (n - 2.0) * (n - 2.0);
    }
    case Platform::kSpark: {
      static constexpr std::array<double, 3> kPreferred = {5.0, 2.0, 3.5};
      const double d = n - kPreferred[index_of(w)];
      return 1.0 + spec.cloud_effect * 0.03 * d * d;
    }
  }
  return 1.0;
}

double clamp_factor(double f) { return std::clamp(f, 0.5, 2.0); }

}  // namespace

double OracleSpec::base(Platform p, Workload w) const { return base_seconds[index_of(p)][index_of(w)]; }

void OracleSpec::validate() const {
  for (const auto& row : base_seconds) {
    for (const double b : row) {
      if (!(b > 0.0)) throw ConstraintError("oracle: base times must be positive");
    }
  }
  if (!(cloud_effect >= 0.0 && heterogeneity_penalty >= 0.0 && parameter_effect >= 0.0 && interaction >= 0.0 &&
        noise >= 0.0)) {
    throw ConstraintError("oracle: effect magnitudes and noise must be non-negative");
  }
}

OracleSpec parse_oracle_spec(std::string_view json_text) {
  OracleSpec spec;
  try {
    const json j = json::parse(json_text);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("base_seconds")) {
      for (const auto& [pname, row] : j.at("base_seconds").items()) {
        const Platform p = parse_platform(pname);
        for (const auto& [wname, value] : row.items()) {
          spec.base_seconds[index_of(p)][index_of(parse_workload(wname))] = value.get<double>();
        }
      }
    }
    spec.cloud_effect = j.value("cloud_effect", spec.cloud_effect);
    spec.heterogeneity_penalty = j.value("heterogeneity_penalty", spec.heterogeneity_penalty);
    spec.parameter_effect = j.value("parameter_effect", spec.parameter_effect);
    spec.interaction = j.value("interaction", spec.interaction);
    spec.noise = j.value("noise", spec.noise);
  } catch (const json::exception& e) {
    throw ParseError(std::string("oracle spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

OracleSpec load_oracle_spec(const std::string& path) { return parse_oracle_spec(read_file(path)); }

std::string oracle_spec_to_json(const OracleSpec& spec) {
  json base = json::object();
  for (const Platform p : kAllPlatforms) {
    for (const Workload w : kAllWorkloads) base[std::string(to_string(p))][std::string(to_string(w))] = spec.base(p, w);
  }
  json j;
  j["seed"] = spec.seed;
  j["base_seconds"] = base;
  j["cloud_effect"] = spec.cloud_effect;
  j["heterogeneity_penalty"] = spec.heterogeneity_penalty;
  j["parameter_effect"] = spec.parameter_effect;
  j["interaction"] = spec.interaction;
  j["noise"] = spec.noise;
  return j.dump(2) + "\n";
}

double expected_time(const OracleSpec& spec, const JointConfig& config, Workload workload, const JointSpace& space) {
  space.check(config);
  const Platform p = space.platform();
  const CloudShape& shape = space.cloud_shape(config.cloud);

  double time = spec.base(p, workload);
  time *= clamp_factor(node_term(spec, p, workload, shape.nodes));
  if (!shape.homogeneous) time *= 1.0 + spec.heterogeneity_penalty;

  // Cloud descriptors for the coupling: node count and flavor spread.
  const double z_nodes = (shape.nodes - 3.0) / 2.0;
  const double z_spread = (shape.max_vcpus - shape.min_vcpus) / 7.0;

  double params = 1.0;
  double coupling = 1.0;
  for (std::size_t i = 0; i < config.assignment.size(); ++i) {
    const std::size_t v = config.assignment[i];
    if (v == 0) continue;  // defaults are neutral
    const auto key = [&](Tag tag) { return Keyed(spec.seed).with(tag).with(index_of(p)).with(i).with(v); };
    // Main effects lean towards improvement: in [-1, 0.5] * magnitude, with
    // a workload-specific share so optima differ across workloads.
    const double shared = 0.75 * key(kMain).uniform() - 0.5;
    const double per_workload = 0.75 * key(kMainWorkload).with(index_of(workload)).uniform() - 0.5;
    params *= clamp_factor(1.0 + spec.parameter_effect * 2.0 * (0.6 * shared + 0.4 * per_workload));
    coupling *= clamp_factor(1.0 + spec.interaction * (key(kCoupleNodes).symmetric() * z_nodes +
                                                       key(kCoupleSpread).symmetric() * z_spread));
  }
  return std::max(kMinTrueSeconds, time * params * coupling);
}

double true_time(const OracleSpec& spec, const JointConfig& config, Workload workload, const JointSpace& space) {
  const double expected = expected_time(spec, config, workload, space);
  if (spec.noise == 0.0) return expected;
  Keyed key(spec.seed);
  key.with(kNoise).with(index_of(space.platform())).with(index_of(workload)).with(config.cloud);
  for (const auto v : config.assignment) key.with(v);
  // Box-Muller from two keyed uniforms.
  const double u1 = 1.0 - key.uniform();  // (0, 1]
  const double u2 = key.with(0x9e37).uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double noisy = expected * (1.0 + spec.noise * std::clamp(z, -3.0, 3.0));
  return std::max(kMinTrueSeconds, noisy);
}

GenerationMode parse_generation_mode(std::string_view name) {
  if (name == "ofat") return GenerationMode::kOfat;
  if (name == "random-k") return GenerationMode::kRandomK;
  throw ParseError("unknown generation mode '" + std::string(name) + "' (expected ofat or random-k)");
}

Dataset gen_dataset(const OracleSpec& spec, const JointSpace& space, GenerationMode mode, std::uint64_t seed,
                    std::size_t k) {
  spec.validate();
  Dataset data;
  const auto emit = [&](const JointConfig& config, Workload w) {
    TrainingSample s;
    s.platform = space.platform();
    s.workload = w;
    s.config = config;
    s.exec_time = true_time(spec, config, w, space);
    data.samples.push_back(std::move(s));
  };

  if (mode == GenerationMode::kOfat) {
    data.provenance = "oracle ofat " + std::string(to_string(space.platform()));
    for (std::size_t cloud = 0; cloud < space.clouds().size(); ++cloud) {
      for (const Workload w : kAllWorkloads) {
        const JointConfig defaults = space.default_config(cloud);
        emit(defaults, w);
        for (std::size_t i = 0; i < space.parameter_count(); ++i) {
          for (std::size_t v = 1; v < space.domain_size(i + 1); ++v) {
            JointConfig modified = defaults;
            modified.assignment[i] = v;
            emit(modified, w);
          }
        }
      }
    }
  } else {
    data.provenance = "oracle random-k " + std::string(to_string(space.platform()));
    Rng rng(seed);
    for (std::size_t n = 0; n < k; ++n) {
      JointConfig config;
      config.cloud = rng.below(space.clouds().size());
      config.assignment.resize(space.parameter_count());
      for (std::size_t i = 0; i < config.assignment.size(); ++i) config.assignment[i] = rng.below(space.domain_size(i + 1));
      const Workload w = kAllWorkloads[rng.below(kAllWorkloads.size())];
      emit(config, w);
    }
  }
  return data;
}

Dataset gen_dataset(const OracleSpec& spec, const Catalog& catalog, const std::vector<Platform>& platforms,
                    GenerationMode mode, std::uint64_t seed, std::size_t k) {
  Dataset all;
  all.provenance = mode == GenerationMode::kOfat ? "oracle ofat" : "oracle random-k";
  for (const Platform p : platforms) {
    const Dataset part = gen_dataset(spec, catalog.space(p), mode, derive_seed(seed, index_of(p)), k);
    all.samples.insert(all.samples.end(), part.samples.begin(), part.samples.end());
  }
  return all;
}

}  // namespace cotune
