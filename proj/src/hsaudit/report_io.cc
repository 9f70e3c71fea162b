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

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"

namespace hsaudit {
namespace {

using nlohmann::json;

json NumberOrNull(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

json HyperParamsToJson(const HyperParams& hp) {
  return json{{"learning_rate", hp.learning_rate},
              {"clip_norm", hp.clip_norm},
              {"noise_multiplier", hp.noise_multiplier},
              {"sampling_rate", hp.sampling_rate},
              {"steps", hp.steps},
              {"expected_batch", hp.expected_batch}};
}

}  // namespace

std::string FormatNumber(double value) { return absl::StrFormat("%.9g", value); }

std::string CurveToCsv(std::span<const CurvePoint> curve) {
  std::string out = "alpha,beta\n";
  for (const CurvePoint& p : curve) {
    absl::StrAppend(&out, FormatNumber(p.alpha), ",", FormatNumber(p.beta),
                    "\n");
  }
  return out;
}

std::string RocToCsv(const RocCurve& roc) {
  std::string out = "alpha,beta,threshold\n";
  for (const RocPoint& p : roc.points) {
    absl::StrAppend(&out, FormatNumber(p.alpha), ",", FormatNumber(p.beta),
                    ",", FormatNumber(p.threshold), "\n");
  }
  return out;
}

std::string ProfileToCsv(std::span<const std::pair<double, double>> profile) {
  std::string out = "epsilon,delta\n";
  for (const auto& [eps, delta] : profile) {
    absl::StrAppend(&out, FormatNumber(eps), ",", FormatNumber(delta), "\n");
  }
  return out;
}

std::string CurveToJson(std::span<const CurvePoint> curve) {
  json points = json::array();
  for (const CurvePoint& p : curve) {
    points.push_back({{"alpha", p.alpha}, {"beta", p.beta}});
  }
  return json{{"points", points}}.dump(2);
}

std::string ReportToJson(const AuditReport& report) {
  json per_run = json::array();
  for (const EpsilonEstimate& e : report.per_run) {
    per_run.push_back({{"epsilon", e.value}, {"exceeds_grid", e.exceeds_grid}});
  }
  json doc{
      {"hyperparams", HyperParamsToJson(report.hp)},
      {"num_zeros", report.num_zeros},
      {"trials_per_world", report.trials_per_world},
      {"master_seed", report.master_seed},
      {"delta", report.delta},
      {"target_epsilon", report.target_epsilon.has_value()
                             ? json(*report.target_epsilon)
                             : json(nullptr)},
      {"runs", per_run},
      {"mean_epsilon", NumberOrNull(report.mean)},
      {"std_epsilon", NumberOrNull(report.std_dev)},
      {"warnings", report.warnings},
      {"artifacts",
       {{"observed_roc", kObservedRocFile},
        {"pld_curve", kPldCurveFile},
        {"mog_curve", kMogCurveFile}}},
  };
  return doc.dump(2) + "\n";
}

absl::Status WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot open ", path, "."));
  }
  out << text;
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("failed writing ", path, "."));
  }
  return absl::OkStatus();
}

absl::Status WriteAuditArtifacts(const AuditReport& report,
                                 const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", directory, ": ", ec.message()));
  }
  const std::filesystem::path dir(directory);
  for (const auto& [name, text] :
       std::initializer_list<std::pair<const char*, std::string>>{
           {kReportFile, ReportToJson(report)},
           {kObservedRocFile, RocToCsv(report.observed)},
           {kPldCurveFile, CurveToCsv(report.pld_curve)},
           {kMogCurveFile, CurveToCsv(report.mog_curve)}}) {
    if (absl::Status s = WriteTextFile((dir / name).string(), text); !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

}  // namespace hsaudit
