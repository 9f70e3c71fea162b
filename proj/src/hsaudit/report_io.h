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

// CSV and JSON serialization of curves, privacy profiles and audit reports.
// CSV files carry a header row and print numbers with 9 significant digits.

#ifndef HSAUDIT_REPORT_IO_H_
#define HSAUDIT_REPORT_IO_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "hsaudit/audit.h"
#include "hsaudit/tradeoff.h"

namespace hsaudit {

inline constexpr char kReportFile[] = "report.json";
inline constexpr char kObservedRocFile[] = "observed_roc.csv";
inline constexpr char kPldCurveFile[] = "pld_curve.csv";
inline constexpr char kMogCurveFile[] = "mog_curve.csv";

std::string FormatNumber(double value);

std::string CurveToCsv(std::span<const CurvePoint> curve);
std::string RocToCsv(const RocCurve& roc);
std::string ProfileToCsv(std::span<const std::pair<double, double>> profile);

std::string CurveToJson(std::span<const CurvePoint> curve);
std::string ReportToJson(const AuditReport& report);

absl::Status WriteTextFile(const std::string& path, const std::string& text);

// Writes report.json, observed_roc.csv, pld_curve.csv and mog_curve.csv into
// `directory`, creating it if needed.
absl::Status WriteAuditArtifacts(const AuditReport& report,
                                 const std::string& directory);

}  // namespace hsaudit

#endif  // HSAUDIT_REPORT_IO_H_
