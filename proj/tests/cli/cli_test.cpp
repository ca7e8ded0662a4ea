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


#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cotune/cotune.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("cotune_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args, const std::string& env = "") {
  const fs::path log = scratch() / "last_output.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(COTUNE_CLI) + "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = cotune::read_file(log.string());
  return r;
}

std::string oracle_spec() { return std::string(COTUNE_TEST_DATA_DIR) + "/oracle_default.json"; }

std::string dir(const std::string& name) { return (scratch() / name).string(); }

std::size_t data_rows(const std::string& csv) {
  std::ifstream in(csv);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) lines += !line.empty();
  return lines - 1;
}

json load_json(const std::string& path) { return json::parse(cotune::read_file(path)); }

// One OFAT dataset and trained models shared by the tests below.
const std::string& trained_run() {
  static const std::string out = [] {
    const std::string d = dir("shared");
    EXPECT_EQ(run("gen-data --oracle-spec " + oracle_spec() + " --mode ofat --platforms all --out-dir " + d).code, 0);
    EXPECT_EQ(run("train --data " + d + "/dataset.csv --seed 7 --out-dir " + d).code, 0);
    return d;
  }();
  return out;
}

class CliEnvironment : public ::testing::Environment {
 public:
  void TearDown() override { fs::remove_all(scratch()); }
};
const auto* const kEnvironment = ::testing::AddGlobalTestEnvironment(new CliEnvironment);

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("gen-data --out-dir " + dir("no_spec")).code, 2);
  EXPECT_EQ(run("gen-data --oracle-spec " + oracle_spec() + " --mode grid").code, 2);
  EXPECT_EQ(run("recommend --platform Storm --workload Sort").code, 2);
  EXPECT_EQ(run("train --data /nonexistent.csv").code, 2);
}

TEST(CliGenData, OfatAllPlatforms) {
  const std::string d = trained_run();
  EXPECT_EQ(data_rows(d + "/dataset.csv"), 1881u);
  const auto provenance = load_json(d + "/provenance.json");
  EXPECT_EQ(provenance["rows"], 1881);
  EXPECT_EQ(provenance["mode"], "ofat");
}

TEST(CliGenData, RandomKFlinkOnly) {
  const std::string d = dir("random_k");
  const auto r = run("gen-data --oracle-spec " + oracle_spec() + " --mode random-k --k 100 --platform Flink --out-dir " + d);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(data_rows(d + "/dataset.csv"), 100u);
  EXPECT_NE(r.output.find("100 rows"), std::string::npos);
}

TEST(CliGenData, SameSeedSameBytes) {
  const std::string a = dir("gen_a"), b = dir("gen_b");
  ASSERT_EQ(run("gen-data --oracle-spec " + oracle_spec() + " --mode random-k --k 40 --seed 3 --out-dir " + a).code, 0);
  ASSERT_EQ(run("gen-data --oracle-spec " + oracle_spec() + " --mode random-k --k 40 --seed 3 --out-dir " + b).code, 0);
  EXPECT_EQ(cotune::read_file(a + "/dataset.csv"), cotune::read_file(b + "/dataset.csv"));
  EXPECT_EQ(cotune::read_file(a + "/manifest.json"), cotune::read_file(b + "/manifest.json"));
}

TEST(CliTrain, ModelsAndReport) {
  const std::string d = trained_run();
  for (const char* p : {"Hadoop", "Spark", "Flink"}) {
    EXPECT_TRUE(fs::exists(d + "/model_" + p + ".json")) << p;
    const auto report = load_json(d + "/r2_report.json")["platforms"][p];
    EXPECT_GT(report["forest"]["validation_r2"].get<double>(), report["linear"]["validation_r2"].get<double>());
  }
}

TEST(CliTrain, SeedReproducesModelFiles) {
  const std::string d = trained_run();
  const std::string again = dir("train_again");
  ASSERT_EQ(run("train --data " + d + "/dataset.csv --seed 7 --out-dir " + again, "COTUNE_THREADS=1").code, 0);
  for (const char* p : {"Hadoop", "Spark", "Flink"}) {
    const std::string name = std::string("/model_") + p + ".json";
    EXPECT_EQ(cotune::fnv1a64(cotune::read_file(d + name)), cotune::fnv1a64(cotune::read_file(again + name))) << p;
  }
  EXPECT_EQ(cotune::read_file(d + "/r2_report.json"), cotune::read_file(again + "/r2_report.json"));
}

TEST(CliTrain, CorruptRowReportsLine) {
  const std::string d = dir("corrupt");
  fs::create_directories(d);
  cotune::write_file(d + "/bad.csv", std::string(cotune::kCsvHeader) +
                                         "\nFlink,Sort,C0,A;A;A;A;A;A;A;A,30\nFlink,Sort,C0,A;A;A;A;A;A;A;A,-5\n");
  const auto r = run("train --data " + d + "/bad.csv --out-dir " + d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;
}

TEST(CliRecommend, FlinkSortShapeAndDeterminism) {
  const std::string d = trained_run();
  const std::string args = "recommend --platform Flink --workload Sort --budget 2000 --models-dir " + d + " --out-dir ";
  ASSERT_EQ(run(args + dir("rec_a")).code, 0);
  ASSERT_EQ(run(args + dir("rec_b")).code, 0);
  const auto rec = load_json(dir("rec_a") + "/recommendation_Flink_Sort.json");
  EXPECT_EQ(rec["parameters"].size(), 8u);
  EXPECT_TRUE(rec["cloud"].is_string());
  EXPECT_GT(rec["predicted_time_s"].get<double>(), 0.0);
  EXPECT_GT(rec["predicted_cost"].get<double>(), 0.0);
  for (const char* f : {"/recommendation_Flink_Sort.json", "/trace_Flink_Sort.csv"}) {
    EXPECT_EQ(cotune::read_file(dir("rec_a") + f), cotune::read_file(dir("rec_b") + f)) << f;
  }
  EXPECT_EQ(data_rows(dir("rec_a") + "/trace_Flink_Sort.csv"), rec["search"]["evaluations"].get<std::size_t>());
}

TEST(CliRecommend, MissingModelIsRuntimeError) {
  EXPECT_EQ(run("recommend --platform Flink --workload Sort --models-dir " + dir("empty")).code, 1);
}

TEST(CliBruteForce, RecommendWithinFivePercent) {
  const std::string d = trained_run();
  const std::string out = dir("bf");
  ASSERT_EQ(run("brute-force --platform Flink --workload Sort --models-dir " + d + " --out-dir " + out).code, 0);
  const double exact = load_json(out + "/brute_force_Flink_Sort.json")["predicted_time_s"].get<double>();
  int close = 0;
  for (int seed = 0; seed < 20; ++seed) {
    ASSERT_EQ(run("recommend --platform Flink --workload Sort --seed " + std::to_string(seed) + " --models-dir " + d +
                  " --out-dir " + out)
                  .code,
              0);
    const double found = load_json(out + "/recommendation_Flink_Sort.json")["predicted_time_s"].get<double>();
    EXPECT_GE(found, exact);
    close += found <= 1.05 * exact;
  }
  EXPECT_GE(close, 18);
}

TEST(CliEvaluate, NoiseFreeOracleGivesNonNegativeReduction) {
  const std::string d = trained_run();
  const std::string out = dir("eval");
  fs::create_directories(out);
  auto spec = cotune::load_oracle_spec(oracle_spec());
  spec.noise = 0.0;
  cotune::write_file(out + "/clean.json", cotune::oracle_spec_to_json(spec));
  std::string recs;
  for (const char* w : {"Sort", "WordCount", "KMeans"}) {
    ASSERT_EQ(run(std::string("recommend --platform Flink --workload ") + w + " --models-dir " + d + " --out-dir " + out)
                  .code,
              0);
    recs += " " + out + "/recommendation_Flink_" + w + ".json";
  }
  const auto r = run("evaluate --recommendations" + recs + " --oracle-spec " + out + "/clean.json --out-dir " + out);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto report = load_json(out + "/evaluation.json");
  EXPECT_GE(report["overall"]["mean_time_reduction"].get<double>(), 0.0);
  EXPECT_EQ(data_rows(out + "/evaluation.csv"), 33u);

  const auto manifest = load_json(out + "/manifest.json");
  EXPECT_EQ(manifest["catalog_hash"], cotune::hex64(cotune::fnv1a64(cotune::bundled_catalog_json())));
  EXPECT_TRUE(manifest["runs"].contains("evaluate"));
  EXPECT_TRUE(manifest["runs"].contains("recommend Flink_Sort"));
  EXPECT_EQ(manifest["runs"]["recommend Flink_Sort"]["rrs"]["seed"], 1);
}

TEST(CliEvaluate, TruthSourceIsRequired) {
  const std::string d = trained_run();
  ASSERT_EQ(run("recommend --platform Spark --workload Sort --models-dir " + d + " --out-dir " + d).code, 0);
  EXPECT_EQ(run("evaluate --recommendations " + d + "/recommendation_Spark_Sort.json").code, 2);
  // The OFAT grid never measured the tuned multi-parameter config.
  const auto r = run("evaluate --recommendations " + d + "/recommendation_Spark_Sort.json --measured " + d +
                     "/dataset.csv --out-dir " + d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("no measurement"), std::string::npos) << r.output;
}

}  // namespace
