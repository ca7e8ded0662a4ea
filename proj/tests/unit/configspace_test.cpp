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


#include <cmath>
#include <cstdint>
#include <set>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cotune/configspace.hpp"
#include "test_support.hpp"

namespace {

using cotune::bundled_catalog;
using cotune::JointConfig;
using cotune::Platform;
using cotune::testing::data_path;

nlohmann::json raw_catalog() { return nlohmann::json::parse(cotune::read_file(data_path("catalog.json"))); }

// Product of domain sizes straight from the catalog file, times the cloud count.
std::uint64_t raw_space_size(const std::string& platform) {
  const auto j = raw_catalog();
  std::uint64_t product = j["clouds"].size();
  for (const auto& p : j["platforms"]) {
    if (p["name"] != platform) continue;
    for (const auto& param : p["parameters"]) product *= param["domain"].size();
  }
  return product;
}

JointConfig random_config(const cotune::JointSpace& space, cotune::Rng& rng) {
  JointConfig c;
  c.cloud = rng.below(space.clouds().size());
  for (std::size_t i = 0; i < space.parameter_count(); ++i) c.assignment.push_back(rng.below(space.domain_size(i + 1)));
  return c;
}

TEST(Catalog, BundledParameterCounts) {
  const auto& cat = bundled_catalog();
  EXPECT_EQ(cat.platform(Platform::kHadoop).parameters.size(), 13u);
  EXPECT_EQ(cat.platform(Platform::kSpark).parameters.size(), 11u);
  EXPECT_EQ(cat.platform(Platform::kFlink).parameters.size(), 8u);
  EXPECT_EQ(cat.clouds.size(), 11u);
  EXPECT_EQ(cat.flavors.size(), 8u);
}

TEST(Catalog, HadoopCompressionCodecDomain) {
  const auto& hadoop = bundled_catalog().platform(Platform::kHadoop);
  const auto& h3 = hadoop.parameters[hadoop.parameter_index("H3")];
  EXPECT_EQ(h3.domain, (std::vector<std::string>{"Default", "Gzip", "Bzip2", "Lz4"}));
}

TEST(Catalog, CloudC1Counts) {
  const auto& clouds = bundled_catalog().clouds;
  ASSERT_EQ(clouds[1].id, "C1");
  EXPECT_EQ(clouds[1].counts, (std::map<std::string, int>{{"m.medium", 1}, {"l.xlarge", 1}}));
  EXPECT_FALSE(clouds[1].homogeneous());
  EXPECT_EQ(clouds[1].node_count(), 2);
}

TEST(Catalog, EmbeddedCopyMatchesDataFile) {
  EXPECT_EQ(cotune::bundled_catalog_json(), cotune::read_file(data_path("catalog.json")));
}

TEST(Catalog, OfatGridSizes) {
  const auto& cat = bundled_catalog();
  EXPECT_EQ(cat.platform(Platform::kHadoop).ofat_grid_size(), 20u);
  EXPECT_EQ(cat.platform(Platform::kSpark).ofat_grid_size(), 20u);
  EXPECT_EQ(cat.platform(Platform::kFlink).ofat_grid_size(), 17u);
}

TEST(Catalog, NineVcpuConfigIsRejectedWithContext) {
  auto j = raw_catalog();
  j["clouds"][0]["counts"] = {{"l.small", 1}, {"m.xlarge", 1}};
  try {
    cotune::parse_catalog(j.dump());
    FAIL() << "expected a constraint violation";
  } catch (const cotune::ConstraintError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("C0"), std::string::npos) << what;
    EXPECT_NE(what.find("9"), std::string::npos) << what;
  }
}

TEST(Catalog, MalformedJsonIsParseError) {
  EXPECT_THROW(cotune::parse_catalog("{\"platforms\": ["), cotune::ParseError);
  EXPECT_THROW(cotune::parse_catalog("{}"), cotune::ParseError);
  EXPECT_THROW(cotune::load_catalog("/nonexistent/catalog.json"), cotune::Error);
}

TEST(Catalog, UnknownFlavorInCloudIsRejected) {
  auto j = raw_catalog();
  j["clouds"][3]["counts"]["x.huge"] = 1;
  EXPECT_THROW(cotune::parse_catalog(j.dump()), cotune::ConstraintError);
}

TEST(Catalog, DuplicateDomainValueIsRejected) {
  auto j = raw_catalog();
  j["platforms"][2]["parameters"][0]["domain"][1] = j["platforms"][2]["parameters"][0]["domain"][0];
  EXPECT_THROW(cotune::parse_catalog(j.dump()), cotune::ConstraintError);
}

TEST(ValidateCloud, TableConfigsPass) {
  const auto& cat = bundled_catalog();
  const cotune::ResourceTotals want{10, 200.0, 20.0};
  EXPECT_EQ(cat.totals, want);
  for (const auto& cloud : cat.clouds) {
    const auto v = cotune::validate_cloud(cloud, cat.flavors, want);
    EXPECT_TRUE(v.ok) << cloud.id << ": " << v.message;
    EXPECT_EQ(v.actual, want) << cloud.id;
  }
}

TEST(ValidateCloud, HandSummedTotals) {
  const auto& cat = bundled_catalog();
  // C0 = 2 x l.small (5 vCPU, 100 GB, 10 GB); C9 = 5 x m.medium (2 vCPU, 40 GB, 4 GB).
  const auto c0 = cotune::validate_cloud(cat.clouds[0], cat.flavors, cat.totals);
  EXPECT_EQ(c0.actual, (cotune::ResourceTotals{2 * 5, 2 * 100.0, 2 * 10.0}));
  const auto c9 = cotune::validate_cloud(cat.clouds[9], cat.flavors, cat.totals);
  EXPECT_EQ(c9.actual, (cotune::ResourceTotals{5 * 2, 5 * 40.0, 5 * 4.0}));
}

TEST(ValidateCloud, SingleSmallNodeIsViolation) {
  const auto& cat = bundled_catalog();
  const auto v = cotune::validate_cloud({"tiny", {{"m.small", 1}}}, cat.flavors, cat.totals);
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.actual.vcpus, 1);
  EXPECT_NE(v.message.find("1"), std::string::npos);
  EXPECT_NE(v.message.find("10"), std::string::npos);
}

TEST(ValidateCloud, UnknownFlavorThrows) {
  const auto& cat = bundled_catalog();
  EXPECT_THROW(cotune::validate_cloud({"bad", {{"z.tiny", 2}}}, cat.flavors, cat.totals), cotune::ConstraintError);
}

TEST(ValidateCloud, AnySingleCountPerturbationFails) {
  const auto& cat = bundled_catalog();
  for (const auto& cloud : cat.clouds) {
    for (const auto& flavor : cat.flavors) {
      for (int delta : {-1, +1}) {
        auto changed = cloud;
        const int count = (changed.counts.count(flavor.name) ? changed.counts[flavor.name] : 0) + delta;
        if (count < 0) continue;
        changed.counts[flavor.name] = count;
        EXPECT_FALSE(cotune::validate_cloud(changed, cat.flavors, cat.totals).ok)
            << cloud.id << " " << flavor.name << " " << delta;
      }
    }
  }
}

TEST(Encode, CloudCoordinateIsBinCenter) {
  const auto space = bundled_catalog().space(Platform::kHadoop);
  const auto point = cotune::encode(space.default_config(0), space);
  ASSERT_EQ(point.coords.size(), 14u);
  EXPECT_DOUBLE_EQ(point.coords[0], 0.5 / 11.0);
  EXPECT_NEAR(point.coords[0], 0.04545, 1e-5);
}

TEST(Encode, DefaultAssignmentUsesFirstBin) {
  const auto space = bundled_catalog().space(Platform::kHadoop);
  const auto point = cotune::encode(space.default_config(0), space);
  for (std::size_t i = 1; i < point.coords.size(); ++i) {
    EXPECT_DOUBLE_EQ(point.coords[i], 0.5 / static_cast<double>(space.domain_size(i))) << i;
  }
}

TEST(Encode, InvalidConfigIsRejected) {
  const auto space = bundled_catalog().space(Platform::kFlink);
  auto c = space.default_config(0);
  c.assignment[0] = 5;
  EXPECT_THROW(cotune::encode(c, space), cotune::ConstraintError);
  c = space.default_config(0);
  c.cloud = 11;
  EXPECT_THROW(cotune::encode(c, space), cotune::ConstraintError);
  c = space.default_config(0);
  c.assignment.pop_back();
  EXPECT_THROW(cotune::encode(c, space), cotune::ConstraintError);
}

TEST(Decode, TopAndBottomBins) {
  const auto space = bundled_catalog().space(Platform::kHadoop);
  // H3 has four values; it is coordinate 3 (cloud, H1, H2, H3).
  ASSERT_EQ(space.domain_size(3), 4u);
  cotune::UnitPoint point{std::vector<double>(space.dimension(), 0.0)};
  point.coords[3] = 0.999;
  auto c = cotune::decode(point, space);
  EXPECT_EQ(c.assignment[2], 3u);
  EXPECT_EQ(c.cloud, 0u);
  point.coords[3] = 0.0;
  EXPECT_EQ(cotune::decode(point, space).assignment[2], 0u);
}

TEST(Decode, CoordinateOneClampsToTopBin) {
  const auto space = bundled_catalog().space(Platform::kFlink);
  cotune::UnitPoint point{std::vector<double>(space.dimension(), 1.0)};
  const auto c = cotune::decode(point, space);
  EXPECT_EQ(c.cloud, 10u);
  for (std::size_t i = 0; i < c.assignment.size(); ++i) EXPECT_EQ(c.assignment[i], space.domain_size(i + 1) - 1);
}

TEST(Decode, DimensionMismatchThrows) {
  const auto space = bundled_catalog().space(Platform::kFlink);
  EXPECT_THROW(cotune::decode(cotune::UnitPoint{{0.1, 0.2}}, space), cotune::ConstraintError);
}

TEST(Decode, UniformCoordinatesHitEachBinEqually) {
  const auto space = bundled_catalog().space(Platform::kHadoop);
  constexpr int kDraws = 100000;
  const std::size_t k = space.domain_size(3);
  std::vector<int> hits(k, 0);
  cotune::Rng rng(12345);
  cotune::UnitPoint point{std::vector<double>(space.dimension(), 0.0)};
  for (int i = 0; i < kDraws; ++i) {
    point.coords[3] = rng.uniform();
    ++hits[cotune::decode(point, space).assignment[2]];
  }
  const double p = 1.0 / static_cast<double>(k);
  const double expected = kDraws * p;
  const double sigma = std::sqrt(kDraws * p * (1.0 - p));
  double chi2 = 0.0;
  for (std::size_t b = 0; b < k; ++b) {
    EXPECT_NEAR(hits[b], expected, 3.0 * sigma) << "bin " << b;
    chi2 += (hits[b] - expected) * (hits[b] - expected) / expected;
  }
  // 99.9th percentile of chi-square with 3 degrees of freedom.
  EXPECT_LT(chi2, 16.27);
}

TEST(RoundTrip, SampledHadoopAndSpark) {
  for (const auto platform : {Platform::kHadoop, Platform::kSpark}) {
    const auto space = bundled_catalog().space(platform);
    cotune::Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
      const auto c = random_config(space, rng);
      EXPECT_EQ(cotune::decode(cotune::encode(c, space), space), c);
    }
  }
}

TEST(RoundTrip, ExhaustiveFlinkAndInjective) {
  const auto space = bundled_catalog().space(Platform::kFlink);
  std::set<std::vector<double>> seen;
  std::uint64_t visited = 0;
  cotune::brute_force_min(
      [&](const JointConfig& c) {
        const auto point = cotune::encode(c, space);
        EXPECT_EQ(cotune::decode(point, space), c);
        seen.insert(point.coords);
        ++visited;
        return 0.0;
      },
      space);
  EXPECT_EQ(visited, 53460u);
  EXPECT_EQ(seen.size(), 53460u);
}

TEST(RoundTrip, EncodedPointsStayInsideUnitCube) {
  for (const auto platform : cotune::kAllPlatforms) {
    const auto space = bundled_catalog().space(platform);
    cotune::Rng rng(3);
    for (int i = 0; i < 500; ++i) {
      for (const double x : cotune::encode(random_config(space, rng), space).coords) {
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 1.0);
      }
    }
  }
}

TEST(SpaceSize, FlinkProduct) {
  EXPECT_EQ(cotune::space_size(bundled_catalog().space(Platform::kFlink)), 11u * (5 * 3 * 3 * 2 * 3 * 3 * 3 * 2));
  EXPECT_EQ(cotune::space_size(bundled_catalog().space(Platform::kFlink)), 53460u);
}

TEST(SpaceSize, MatchesIndependentProduct) {
  const auto& cat = bundled_catalog();
  EXPECT_EQ(cotune::space_size(cat.space(Platform::kHadoop)), raw_space_size("Hadoop"));
  EXPECT_EQ(cotune::space_size(cat.space(Platform::kSpark)), raw_space_size("Spark"));
  EXPECT_EQ(cotune::space_size(cat.space(Platform::kFlink)), raw_space_size("Flink"));
}

TEST(SpaceSize, EmptyProductIsOne) {
  const auto& cat = bundled_catalog();
  const cotune::JointSpace space({Platform::kFlink, {}}, {cat.clouds[0]}, cat.flavors);
  EXPECT_EQ(cotune::space_size(space), 1u);
  EXPECT_EQ(space.dimension(), 1u);
}

TEST(Labels, AssignmentTextRoundTrip) {
  const auto space = bundled_catalog().space(Platform::kHadoop);
  const auto parsed = space.parse_assignment("A;B;C;A;B;C;B;B;B;B;B;B;B");
  EXPECT_EQ(parsed, (std::vector<std::size_t>{0, 1, 2, 0, 1, 2, 1, 1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(space.assignment_labels({0, parsed}), "A;B;C;A;B;C;B;B;B;B;B;B;B");
  EXPECT_THROW(space.parse_assignment("A;B"), cotune::ParseError);
  EXPECT_THROW(space.parse_assignment("D;A;A;A;A;A;A;A;A;A;A;A;A"), cotune::ParseError);
}

TEST(Labels, EnumNames) {
  for (const auto p : cotune::kAllPlatforms) EXPECT_EQ(cotune::parse_platform(cotune::to_string(p)), p);
  for (const auto w : cotune::kAllWorkloads) EXPECT_EQ(cotune::parse_workload(cotune::to_string(w)), w);
  EXPECT_THROW(cotune::parse_platform("Storm"), cotune::ParseError);
  EXPECT_THROW(cotune::parse_workload("Grep"), cotune::ParseError);
  EXPECT_EQ(cotune::value_label(0), "A");
  EXPECT_EQ(cotune::value_label(3), "D");
  EXPECT_EQ(cotune::parse_value_label("C"), 2u);
}

}  // namespace
