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

#include <map>
#include <string>
#include <string_view>

#include "cotune/configspace.hpp"

namespace cotune {

struct PriceTable {
  std::map<std::string, double> hourly;  // flavor name -> currency per hour

  double price(std::string_view flavor) const;  // throws ConstraintError if unpriced
};

// Prices carried by the catalog's flavor entries.
PriceTable price_table(const Catalog& catalog);

// per_vcpu_hour * vcpus for every catalog flavor.
PriceTable vcpu_proportional_prices(const Catalog& catalog, double per_vcpu_hour);

// Price file: {"flavor": price_per_hour, ...}.
PriceTable parse_prices(std::string_view json_text);
PriceTable load_prices(const std::string& path);
std::string prices_to_json(const PriceTable& prices);

// Sum of count * hourly price over the cloud's flavors.
double hourly_rate(const CloudConfig& cloud, const PriceTable& prices);

// (exec_time / 3600) * hourly_rate, prorated per second.
double cost_of(const CloudConfig& cloud, double exec_time_s, const PriceTable& prices);

}  // namespace cotune
