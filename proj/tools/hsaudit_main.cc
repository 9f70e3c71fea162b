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

// hsaudit: command-line front end to the auditing library.
//
//   hsaudit calibrate --epsilon 4 --q 0.1 --steps 100 --out runs/cal
//   hsaudit tradeoff  --sigma 0.5 --q 0.1 --steps 100 --out runs/fig
//   hsaudit audit     --config audit.toml --workers 8
//   hsaudit simulate  --sigma 0.5 --q 0.1 --steps 100 --world with-target
//
// Options may also be given in a flat TOML/INI file passed with --config;
// the keys are the long option names without dashes ("num-zeros = 1e10").
// Flags on the command line take precedence over the file.

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsaudit/hsaudit.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

constexpr char kManifestFile[] = "manifest.json";
constexpr char kResolvedConfigFile[] = "config.toml";

struct Options {
  std::optional<double> epsilon;
  double delta = 1e-5;
  std::optional<double> q;
  std::optional<int64_t> steps;
  std::optional<double> sigma;
  double num_zeros = 1e10;
  int64_t trials = 5000;
  int runs = 5;
  uint64_t seed = 0;
  int workers = 0;
  std::string out = "hsaudit-out";

  double grid_spacing = 1e-4;
  double grid_min = 0.5;
  double grid_max = 20.0;
  double grid_step = 0.1;
  double profile_max = 20.0;
  size_t curve_points = 1001;
  std::string observed;
  std::string world = "without-target";
  std::optional<double> expected_batch;
  bool trajectory = false;
  bool explicit_records = false;
};

// Thrown for input problems that should print usage guidance.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a library call fails.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Check(hsa_status status, const std::string& what) {
  if (status == HSA_OK) return;
  const std::string message = hsa_last_error();
  if (status == HSA_INVALID_ARGUMENT) {
    throw UsageError(what + ": " + message);
  }
  throw RunError(what + ": " + message);
}

template <typename T>
T Require(const std::optional<T>& value, const std::string& key) {
  if (!value.has_value()) {
    throw UsageError("missing required key '" + key + "' (flag --" + key +
                     " or config key " + key + ")");
  }
  return *value;
}

int64_t WholeCount(double value, const std::string& key) {
  if (!(value >= 0.0) || value > 9.0e15 || value != std::floor(value)) {
    throw UsageError("'" + key + "' must be a nonnegative integer");
  }
  return static_cast<int64_t>(value);
}

std::string Sha256Hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw RunError("SHA-256 failed for " + path.string());
  }
  std::string hex;
  char buffer[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buffer, sizeof(buffer), "%02x", digest[i]);
    hex += buffer;
  }
  return hex;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw RunError("cannot write " + path.string());
}

std::string Format(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

// Records what a command is about to do, then the checksums of what it did.
class Manifest {
 public:
  Manifest(std::string subcommand, const fs::path& out, json config,
           uint64_t seed, int workers)
      : out_(out) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["library_version"] = hsa_version();
    doc_["config"] = std::move(config);
    doc_["master_seed"] = seed;
    doc_["workers"] = workers;
    doc_["output_directory"] = out.string();
    doc_["artifacts"] = json::object();
  }

  void WriteInitial() { Write(); }

  void Finish(const std::vector<std::string>& files) {
    json artifacts = json::object();
    for (const std::string& name : files) {
      artifacts[name] = {{"sha256", Sha256Hex(out_ / name)}};
    }
    doc_["artifacts"] = std::move(artifacts);
    Write();
  }

 private:
  void Write() { WriteText(out_ / kManifestFile, doc_.dump(2) + "\n"); }

  fs::path out_;
  json doc_;
};

json OptionalJson(const std::optional<double>& value) {
  return value.has_value() ? json(*value) : json(nullptr);
}

json ResolvedConfig(const Options& o) {
  return {{"epsilon", OptionalJson(o.epsilon)},
          {"delta", o.delta},
          {"q", OptionalJson(o.q)},
          {"steps", o.steps.has_value() ? json(*o.steps) : json(nullptr)},
          {"sigma", OptionalJson(o.sigma)},
          {"num-zeros", o.num_zeros},
          {"trials", o.trials},
          {"runs", o.runs},
          {"seed", o.seed},
          {"workers", o.workers},
          {"out", o.out},
          {"grid-spacing", o.grid_spacing},
          {"grid-min", o.grid_min},
          {"grid-max", o.grid_max},
          {"grid-step", o.grid_step},
          {"profile-max", o.profile_max},
          {"curve-points", o.curve_points},
          {"observed", o.observed},
          {"world", o.world},
          {"expected-batch", OptionalJson(o.expected_batch)},
          {"trajectory", o.trajectory},
          {"explicit", o.explicit_records}};
}

fs::path PrepareOutput(const Options& o) {
  const fs::path out(o.out);
  std::error_code error;
  fs::create_directories(out, error);
  if (error) throw RunError("cannot create " + o.out + ": " + error.message());
  return out;
}

hsa_accountant_options AccountantOptions(const Options& o) {
  hsa_accountant_options options;
  hsa_accountant_options_init(&options);
  options.grid_spacing = o.grid_spacing;
  return options;
}

double Calibrate(const Options& o, double epsilon, double q, int64_t steps) {
  const hsa_accountant_options options = AccountantOptions(o);
  double sigma = 0.0;
  Check(hsa_calibrate_sigma(epsilon, o.delta, q, steps, &options, &sigma),
        "calibrate");
  return sigma;
}

int RunCalibrate(const Options& o, const std::string& config_text) {
  const double epsilon = Require(o.epsilon, "epsilon");
  const double q = Require(o.q, "q");
  const int64_t steps = Require(o.steps, "steps");
  const fs::path out = PrepareOutput(o);
  Manifest manifest("calibrate", out, ResolvedConfig(o), o.seed, 1);
  manifest.WriteInitial();
  WriteText(out / kResolvedConfigFile, config_text);

  const double sigma = Calibrate(o, epsilon, q, steps);
  const hsa_accountant_options options = AccountantOptions(o);
  hsa_profile* profile = nullptr;
  Check(hsa_profile_create(sigma, q, steps, &options, &profile), "profile");
  double achieved = 0.0;
  hsa_status status = hsa_profile_delta(profile, epsilon, &achieved);
  if (status == HSA_OK) {
    status = hsa_profile_write_csv(profile, 0.0, o.profile_max, 0.01,
                                   (out / "profile.csv").c_str());
  }
  hsa_profile_free(profile);
  Check(status, "profile");

  const json result = {{"epsilon", epsilon}, {"delta", o.delta},
                       {"q", q},             {"steps", steps},
                       {"sigma", sigma},     {"achieved_delta", achieved}};
  WriteText(out / "calibration.json", result.dump(2) + "\n");
  manifest.Finish({kResolvedConfigFile, "calibration.json", "profile.csv"});
  std::cout << Format(sigma) << "\n";
  return kExitOk;
}

int RunTradeoff(const Options& o, const std::string& config_text) {
  const double q = Require(o.q, "q");
  const int64_t steps = Require(o.steps, "steps");
  if (!o.sigma.has_value() && !o.epsilon.has_value()) {
    throw UsageError(
        "missing required key 'sigma' (flag --sigma or config key sigma); "
        "alternatively give 'epsilon' to calibrate it");
  }
  const fs::path out = PrepareOutput(o);
  Manifest manifest("tradeoff", out, ResolvedConfig(o), o.seed, 1);
  manifest.WriteInitial();
  WriteText(out / kResolvedConfigFile, config_text);

  const double sigma =
      o.sigma.has_value() ? *o.sigma : Calibrate(o, *o.epsilon, q, steps);
  const hsa_accountant_options options = AccountantOptions(o);
  std::vector<std::string> files = {kResolvedConfigFile, "pld_curve.csv",
                                    "mog_curve.csv"};

  hsa_profile* profile = nullptr;
  Check(hsa_profile_create(sigma, q, steps, &options, &profile), "profile");
  hsa_curve* pld = nullptr;
  hsa_status status = hsa_curve_from_profile(profile, &pld);
  hsa_profile_free(profile);
  Check(status, "PLD curve");
  status = hsa_curve_write_csv(pld, o.curve_points,
                               (out / "pld_curve.csv").c_str());
  hsa_curve_free(pld);
  Check(status, "PLD curve");

  hsa_curve* mog = nullptr;
  Check(hsa_curve_mog(sigma, q, steps, &mog), "MoG curve");
  status = hsa_curve_write_csv(mog, o.curve_points,
                               (out / "mog_curve.csv").c_str());
  hsa_curve_free(mog);
  Check(status, "MoG curve");

  if (!o.observed.empty()) {
    std::error_code error;
    fs::copy_file(o.observed, out / "observed_roc.csv",
                  fs::copy_options::overwrite_existing, error);
    if (error) {
      throw RunError("cannot copy " + o.observed + ": " + error.message());
    }
    files.push_back("observed_roc.csv");
  }
  manifest.Finish(files);
  std::cout << "sigma " << Format(sigma) << "\n";
  return kExitOk;
}

std::vector<double> EpsilonGrid(const Options& o) {
  if (!(o.grid_step > 0.0) || !(o.grid_min > 0.0) ||
      !(o.grid_max >= o.grid_min)) {
    throw UsageError("epsilon grid needs 0 < grid-min <= grid-max and "
                     "grid-step > 0");
  }
  std::vector<double> grid;
  const auto count = static_cast<int64_t>(
      std::floor((o.grid_max - o.grid_min) / o.grid_step + 1e-9));
  for (int64_t i = 0; i <= count; ++i) {
    // Rounded to 1e-9 so the grid values print as typed.
    grid.push_back(std::round((o.grid_min + i * o.grid_step) * 1e9) / 1e9);
  }
  return grid;
}

int RunAuditCommand(const Options& o, const std::string& config_text) {
  const double q = Require(o.q, "q");
  const int64_t steps = Require(o.steps, "steps");
  if (!o.sigma.has_value() && !o.epsilon.has_value()) {
    throw UsageError(
        "missing required key 'epsilon' (flag --epsilon or config key "
        "epsilon); alternatively give 'sigma' directly");
  }
  const std::vector<double> grid = EpsilonGrid(o);
  const fs::path out = PrepareOutput(o);
  Manifest manifest("audit", out, ResolvedConfig(o), o.seed, o.workers);
  manifest.WriteInitial();
  WriteText(out / kResolvedConfigFile, config_text);

  hsa_audit_config config;
  hsa_audit_config_init(&config);
  config.hp.sampling_rate = q;
  config.hp.steps = steps;
  config.hp.noise_multiplier =
      o.sigma.has_value() ? *o.sigma : Calibrate(o, *o.epsilon, q, steps);
  config.num_zeros = WholeCount(o.num_zeros, "num-zeros");
  config.trials_per_world = o.trials;
  config.master_seed = o.seed;
  config.runs = o.runs;
  config.delta = o.delta;
  config.workers = o.workers;
  config.accountant = AccountantOptions(o);
  config.epsilon_grid = grid.data();
  config.epsilon_grid_size = grid.size();
  if (o.epsilon.has_value()) config.target_epsilon = *o.epsilon;

  hsa_audit_report* report = nullptr;
  Check(hsa_audit_run(&config, &report), "audit");
  hsa_status status = hsa_audit_report_write(report, o.out.c_str());
  std::ostringstream summary;
  const size_t runs = hsa_audit_report_num_runs(report);
  for (size_t i = 0; i < runs && status == HSA_OK; ++i) {
    double epsilon = 0.0;
    int exceeds = 0;
    status = hsa_audit_report_run(report, i, &epsilon, &exceeds);
    summary << "run " << i << " epsilon_emp "
            << (exceeds ? "exceeds-grid" : Format(epsilon)) << "\n";
  }
  summary << "mean " << Format(hsa_audit_report_mean(report)) << " std "
          << Format(hsa_audit_report_std_dev(report)) << "\n";
  for (size_t i = 0; i < hsa_audit_report_num_warnings(report); ++i) {
    std::cerr << "warning: " << hsa_audit_report_warning(report, i) << "\n";
  }
  hsa_audit_report_free(report);
  Check(status, "audit report");
  manifest.Finish({kResolvedConfigFile, "report.json", "observed_roc.csv",
                   "pld_curve.csv", "mog_curve.csv"});
  std::cout << summary.str();
  return kExitOk;
}

int RunSimulate(const Options& o, const std::string& config_text) {
  const double q = Require(o.q, "q");
  const int64_t steps = Require(o.steps, "steps");
  const double sigma = Require(o.sigma, "sigma");
  bool with_target = false;
  if (o.world == "with-target" || o.world == "D'") {
    with_target = true;
  } else if (o.world != "without-target" && o.world != "D") {
    throw UsageError("world must be 'without-target' or 'with-target'");
  }
  const int64_t num_zeros = WholeCount(o.num_zeros, "num-zeros");
  if (o.explicit_records && num_zeros > 10'000'000) {
    throw UsageError("--explicit visits every record; use num-zeros <= 1e7");
  }
  const fs::path out = PrepareOutput(o);
  Manifest manifest("simulate", out, ResolvedConfig(o), o.seed, 1);
  manifest.WriteInitial();
  WriteText(out / kResolvedConfigFile, config_text);

  hsa_hyperparams hp;
  hsa_hyperparams_init(&hp);
  hp.noise_multiplier = sigma;
  hp.sampling_rate = q;
  hp.steps = steps;
  // Without zero records the batch size never enters the update.
  hp.expected_batch = o.expected_batch.value_or(
      num_zeros > 0 ? q * static_cast<double>(num_zeros) : 1.0);

  double final_iterate = 0.0;
  std::vector<double> trajectory;
  if (o.trajectory) trajectory.resize(static_cast<size_t>(steps) + 1);
  Check(hsa_simulate(&hp, num_zeros, with_target ? 1 : 0, o.seed,
                     o.explicit_records ? 1 : 0, &final_iterate,
                     o.trajectory ? trajectory.data() : nullptr),
        "simulate");
  double llr_sum = 0.0;
  Check(hsa_extract_llr_sum(&hp, final_iterate, &llr_sum), "extract");

  std::vector<std::string> files = {kResolvedConfigFile, "simulation.json"};
  const json result = {{"world", with_target ? "with-target"
                                             : "without-target"},
                       {"seed", o.seed},
                       {"final_iterate", final_iterate},
                       {"llr_sum", llr_sum}};
  WriteText(out / "simulation.json", result.dump(2) + "\n");
  if (o.trajectory) {
    std::string csv = "step,theta\n";
    char row[64];
    for (size_t k = 0; k < trajectory.size(); ++k) {
      std::snprintf(row, sizeof(row), "%zu,%.17g\n", k, trajectory[k]);
      csv += row;
    }
    WriteText(out / "trajectory.csv", csv);
    files.push_back("trajectory.csv");
  }
  manifest.Finish(files);
  char line[64];
  std::snprintf(line, sizeof(line), "%.17g\n", final_iterate);
  std::cout << line;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit hidden-state DP-SGD with an adversarial loss."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat TOML/INI file of option values.");

  Options o;
  app.add_option("--epsilon", o.epsilon, "Target privacy level.");
  app.add_option("--delta", o.delta, "Target delta.")->capture_default_str();
  app.add_option("--q", o.q, "Poisson sampling rate.");
  app.add_option("--steps", o.steps, "Number of DP-SGD steps T.");
  app.add_option("--sigma", o.sigma, "Noise multiplier.");
  app.add_option("--num-zeros", o.num_zeros,
                 "Zero records in the smaller dataset.")
      ->capture_default_str();
  app.add_option("--trials", o.trials, "Trials per world.")
      ->capture_default_str();
  app.add_option("--runs", o.runs, "Independent audit runs.")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed.")->capture_default_str();
  app.add_option("--workers", o.workers, "Worker threads, 0 = all cores.")
      ->capture_default_str();
  app.add_option("--out", o.out, "Output directory.")->capture_default_str();
  app.add_option("--grid-spacing", o.grid_spacing,
                 "Privacy-loss discretization interval.")
      ->capture_default_str();
  app.add_option("--grid-min", o.grid_min, "Smallest audited epsilon.")
      ->capture_default_str();
  app.add_option("--grid-max", o.grid_max, "Largest audited epsilon.")
      ->capture_default_str();
  app.add_option("--grid-step", o.grid_step, "Epsilon grid step.")
      ->capture_default_str();
  app.add_option("--profile-max", o.profile_max,
                 "Largest epsilon in profile.csv.")
      ->capture_default_str();
  app.add_option("--curve-points", o.curve_points,
                 "Alpha values per curve CSV.")
      ->capture_default_str();
  app.add_option("--observed", o.observed,
                 "observed_roc.csv of a prior audit to include.");
  app.add_option("--world", o.world, "without-target or with-target.")
      ->capture_default_str();
  app.add_option("--expected-batch", o.expected_batch,
                 "Override q * num-zeros.");
  app.add_flag("--trajectory", o.trajectory, "Write every iterate.");
  app.add_flag("--explicit", o.explicit_records,
               "Visit every record instead of the structured sampler.");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Noise multiplier for (epsilon, delta).");
  CLI::App* tradeoff =
      app.add_subcommand("tradeoff", "Predicted PLD and MoG curves.");
  CLI::App* audit = app.add_subcommand("audit", "Empirical epsilon.");
  CLI::App* simulate = app.add_subcommand("simulate", "One DP-SGD run.");
  for (CLI::App* sub : {calibrate, tradeoff, audit, simulate}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string config_text = app.config_to_str(true, false);
  try {
    if (*calibrate) return RunCalibrate(o, config_text);
    if (*tradeoff) return RunTradeoff(o, config_text);
    if (*audit) return RunAuditCommand(o, config_text);
    return RunSimulate(o, config_text);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "Run with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
