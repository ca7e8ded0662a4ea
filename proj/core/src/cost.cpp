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

#include "cotune/cost.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace cotune {

double PriceTable::price(std::string_view flavor) const {
  const auto it = hourly.find(std::string(flavor));
  if (it == hourly.end()) throw ConstraintError("no price for flavor '" + std::string(flavor) + "'");
  return it->second;
}

PriceTable price_table(const Catalog& catalog) {
  PriceTable prices;
  for (const auto& f : catalog.flavors) prices.hourly[f.name] = f.hourly_price;
  return prices;
}

PriceTable vcpu_proportional_prices(const Catalog& catalog, double per_vcpu_hour) {
  if (!(per_vcpu_hour >= 0.0)) throw ConstraintError("price per vCPU-hour must be non-negative");
  PriceTable prices;
  for (const auto& f : catalog.flavors) prices.hourly[f.name] = per_vcpu_hour * f.vcpus;
  return prices;
}

PriceTable parse_prices(std::string_view json_text) {
  PriceTable prices;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) throw ParseError("price file must be a JSON object");
    for (const auto& [name, value] : j.items()) {
      const double p = value.get<double>();
      if (!(p >= 0.0) || !std::isfinite(p)) throw ConstraintError("price for '" + name + "' must be non-negative");
      prices.hourly[name] = p;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("price file: ") + e.what());
  }
  return prices;
}

PriceTable load_prices(const std::string& path) { return parse_prices(read_file(path)); }

std::string prices_to_json(const PriceTable& prices) {
  return nlohmann::json(prices.hourly).dump(2) + "\n";
}

double hourly_rate(const CloudConfig& cloud, const PriceTable& prices) {
  double rate = 0.0;
  for (const auto& [flavor, count] : cloud.counts) {
    if (count > 0) rate += count * prices.price(flavor);
  }
  return rate;
}

double cost_of(const CloudConfig& cloud, double exec_time_s, const PriceTable& prices) {
  if (!(exec_time_s > 0.0)) throw ConstraintError("execution time must be positive");
  return exec_time_s / 3600.0 * hourly_rate(cloud, prices);
}

}  // namespace cotune
