//
// Copyright 2026 The hsaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "hsaudit/report_io.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace hsaudit {
namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AuditReport SampleReport() {
  AuditReport report;
  report.hp.noise_multiplier = 0.5;
  report.hp.sampling_rate = 0.1;
  report.hp.steps = 100;
  report.hp.expected_batch = 1e9;
  report.num_zeros = 10'000'000'000;
  report.trials_per_world = 5000;
  report.master_seed = 42;
  report.delta = 1e-5;
  report.per_run = {{4.1, false}, {20.0, true}};
  report.mean = 4.1;
  report.std_dev = 0.0;
  report.observed.points = {{1.0, 0.0, -1.0}, {0.5, 0.25, 0.3}};
  report.pld_curve = {{0.0, 1.0}, {1.0, 0.0}};
  report.mog_curve = {{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}};
  report.warnings = {"skipped epsilon 0.5: example"};
  return report;
}

TEST(FormatNumber, NineSignificantDigits) {
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(1.0 / 3), "0.333333333");
  EXPECT_EQ(FormatNumber(1e-7), "1e-07");
  EXPECT_EQ(FormatNumber(123456789012.0), "1.23456789e+11");
}

TEST(CurveToCsv, HeaderAndRows) {
  const std::vector<CurvePoint> curve = {{0.0, 1.0}, {0.25, 0.5}};
  EXPECT_EQ(CurveToCsv(curve), "alpha,beta\n0,1\n0.25,0.5\n");
}

TEST(RocToCsv, HeaderAndRows) {
  RocCurve roc;
  roc.points = {{1.0, 0.0, -0.5}, {0.5, 0.125, 2.0}};
  EXPECT_EQ(RocToCsv(roc), "alpha,beta,threshold\n1,0,-0.5\n0.5,0.125,2\n");
}

TEST(ProfileToCsv, HeaderAndRows) {
  const std::vector<std::pair<double, double>> profile = {{0.0, 0.5},
                                                          {1.0, 1e-5}};
  EXPECT_EQ(ProfileToCsv(profile), "epsilon,delta\n0,0.5\n1,1e-05\n");
}

TEST(CurveToJson, PointsArray) {
  const std::vector<CurvePoint> curve = {{0.0, 1.0}, {1.0, 0.0}};
  const nlohmann::json doc = nlohmann::json::parse(CurveToJson(curve));
  ASSERT_EQ(doc["points"].size(), 2u);
  EXPECT_EQ(doc["points"][1]["alpha"], 1.0);
}

TEST(ReportToJson, RoundTripsFields) {
  const nlohmann::json doc = nlohmann::json::parse(ReportToJson(SampleReport()));
  EXPECT_EQ(doc["hyperparams"]["steps"], 100);
  EXPECT_EQ(doc["num_zeros"], 10'000'000'000);
  EXPECT_EQ(doc["master_seed"], 42);
  EXPECT_TRUE(doc["target_epsilon"].is_null());
  ASSERT_EQ(doc["runs"].size(), 2u);
  EXPECT_EQ(doc["runs"][0]["epsilon"], 4.1);
  EXPECT_EQ(doc["runs"][1]["exceeds_grid"], true);
  EXPECT_EQ(doc["mean_epsilon"], 4.1);
  EXPECT_EQ(doc["warnings"][0], "skipped epsilon 0.5: example");
  EXPECT_EQ(doc["artifacts"]["pld_curve"], kPldCurveFile);
}

TEST(ReportToJson, UndefinedStatisticsAreNull) {
  AuditReport report = SampleReport();
  report.mean = std::numeric_limits<double>::quiet_NaN();
  report.std_dev = std::numeric_limits<double>::quiet_NaN();
  report.target_epsilon = 4.0;
  const nlohmann::json doc = nlohmann::json::parse(ReportToJson(report));
  EXPECT_TRUE(doc["mean_epsilon"].is_null());
  EXPECT_TRUE(doc["std_epsilon"].is_null());
  EXPECT_EQ(doc["target_epsilon"], 4.0);
}

TEST(ReportToJson, IsStable) {
  EXPECT_EQ(ReportToJson(SampleReport()), ReportToJson(SampleReport()));
}

TEST(WriteTextFile, FailsForMissingDirectory) {
  EXPECT_EQ(WriteTextFile("/nonexistent-dir/x/y.txt", "data").code(),
            absl::StatusCode::kUnavailable);
}

TEST(WriteAuditArtifacts, WritesAllFiles) {
  const std::filesystem::path dir =
      std::filesystem::path(::testing::TempDir()) / "hsaudit_report_io" / "out";
  std::filesystem::remove_all(dir.parent_path());
  const AuditReport report = SampleReport();
  ASSERT_TRUE(WriteAuditArtifacts(report, dir.string()).ok());
  EXPECT_EQ(ReadFile(dir / kReportFile), ReportToJson(report));
  EXPECT_EQ(ReadFile(dir / kObservedRocFile), RocToCsv(report.observed));
  EXPECT_EQ(ReadFile(dir / kPldCurveFile), CurveToCsv(report.pld_curve));
  EXPECT_EQ(ReadFile(dir / kMogCurveFile), CurveToCsv(report.mog_curve));
  std::filesystem::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace hsaudit
