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

#include "cotune/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cotune {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = line.find(',', start);
    fields.push_back(trim(line.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

void permute(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

void check_lengths(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw ConstraintError("length mismatch: " + std::to_string(predicted.size()) + " predictions vs " +
                          std::to_string(actual.size()) + " actual values");
  }
  if (actual.empty()) throw ConstraintError("cannot score an empty prediction set");
}

}  // namespace

Dataset Dataset::only(Platform platform) const {
  Dataset out;
  out.provenance = provenance;
  for (const auto& s : samples) {
    if (s.platform == platform) out.samples.push_back(s);
  }
  return out;
}

std::vector<Platform> Dataset::platforms() const {
  std::vector<Platform> out;
  for (const Platform p : kAllPlatforms) {
    if (std::any_of(samples.begin(), samples.end(), [p](const auto& s) { return s.platform == p; })) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<double> Dataset::labels() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.exec_time);
  return out;
}

Dataset parse_csv(std::string_view text, const Catalog& catalog, std::string provenance) {
  Dataset data;
  data.provenance = std::move(provenance);

  std::vector<JointSpace> spaces;
  for (const auto& spec : catalog.platforms) spaces.push_back(catalog.space(spec.platform));
  const auto space_for = [&](Platform p) -> const JointSpace& {
    for (const auto& s : spaces) {
      if (s.platform() == p) return s;
    }
    throw ParseError("platform " + std::string(to_string(p)) + " is not in the catalog");
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!saw_header) {
      if (line != kCsvHeader) {
        throw ParseError("line 1: expected header '" + std::string(kCsvHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(where + "expected 5 fields, got " + std::to_string(fields.size()));
    }
    try {
      TrainingSample sample;
      sample.line = line_no;
      sample.platform = parse_platform(fields[0]);
      sample.workload = parse_workload(fields[1]);
      const JointSpace& space = space_for(sample.platform);
      sample.config.cloud = space.cloud_index(fields[2]);
      sample.config.assignment = space.parse_assignment(fields[3]);
      sample.exec_time = parse_double(fields[4]);
      if (!(sample.exec_time > 0.0) || !std::isfinite(sample.exec_time)) {
        throw ParseError("exec_time must be positive, got " + std::string(fields[4]));
      }
      data.samples.push_back(std::move(sample));
    } catch (const Error& e) {
      throw ParseError(where + e.what());
    }
  }
  if (!saw_header) throw ParseError("line 1: missing header");
  return data;
}

Dataset load_csv(const std::string& path, const Catalog& catalog) {
  return parse_csv(read_file(path), catalog, path);
}

std::string to_csv(const Dataset& data, const Catalog& catalog) {
  std::vector<JointSpace> spaces;
  for (const auto& spec : catalog.platforms) spaces.push_back(catalog.space(spec.platform));
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : data.samples) {
    const auto it = std::find_if(spaces.begin(), spaces.end(),
                                 [&](const JointSpace& sp) { return sp.platform() == s.platform; });
    if (it == spaces.end()) throw ConstraintError("platform not in catalog");
    it->check(s.config);
    out += to_string(s.platform);
    out += ',';
    out += to_string(s.workload);
    out += ',';
    out += it->clouds()[s.config.cloud].id;
    out += ',';
    out += it->assignment_labels(s.config);
    out += ',';
    out += format_double(s.exec_time);
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const Dataset& data, const Catalog& catalog) {
  write_file(path, to_csv(data, catalog));
}

DataSplit split(const Dataset& data, const SplitOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw ConstraintError("train fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> strata;
  if (options.stratify_by_workload) {
    for (const Workload w : kAllWorkloads) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.samples[i].workload == w) idx.push_back(i);
      }
      if (!idx.empty()) strata.push_back(std::move(idx));
    }
  } else {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    strata.push_back(std::move(idx));
  }

  Rng rng(options.seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  for (auto& stratum : strata) {
    permute(stratum, rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(options.train_fraction * static_cast<double>(stratum.size())));
    train_idx.insert(train_idx.end(), stratum.begin(), stratum.begin() + static_cast<long>(n_train));
    val_idx.insert(val_idx.end(), stratum.begin() + static_cast<long>(n_train), stratum.end());
  }
  if (train_idx.empty() || val_idx.empty()) {
    throw ConstraintError("dataset of " + std::to_string(data.size()) +
                          " samples is too small to split with fraction " +
                          format_double(options.train_fraction));
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  DataSplit out;
  out.train.provenance = data.provenance;
  out.validation.provenance = data.provenance;
  for (const auto i : train_idx) out.train.samples.push_back(data.samples[i]);
  for (const auto i : val_idx) out.validation.samples.push_back(data.samples[i]);
  return out;
}

double r2_score(std::span<const double> predicted, std::span<const double> actual) {
  check_lengths(predicted, actual);
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - ss_res / ss_tot;
}

double mean_relative_error(std::span<const double> predicted, std::span<const double> actual) {
  check_lengths(predicted, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!(actual[i] > 0.0)) throw ConstraintError("relative error needs positive actual values");
    sum += std::abs(predicted[i] - actual[i]) / actual[i];
  }
  return sum / static_cast<double>(actual.size());
}

}  // namespace cotune
