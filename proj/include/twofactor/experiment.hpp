// Copyright 2026 The twofactor Authors.
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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twofactor/certifier.hpp"
#include "twofactor/coupling.hpp"
#include "twofactor/lyapunov.hpp"
#include "twofactor/model.hpp"
#include "twofactor/path.hpp"
#include "twofactor/quadrature.hpp"
#include "twofactor/serialization.hpp"

namespace twofactor {

/// Task names accepted by the driver: certify, decay, wasserstein, moments,
/// marginal-check, all.
const std::vector<std::string>& task_names();

struct ExperimentConfig {
  ModelSpec model;
  double theta = 0.3;
  double delta = 1.0;
  /// Default 2, or 2(1 + |gamma|/lambda) for TYPE_II.
  std::optional<double> kappa0;
  PathConfig path;
  CouplingMode coupling;
  CoalescenceOptions coalescence;
  std::string task = "all";
  std::string output_dir;
  /// Coupled paths for decay and wasserstein.
  std::size_t n_paths = 10000;
  GridSpec grid;
  QuadratureConfig quad;
  TestFunction test = TestFunction::V;
  double zeta_slack = 0.01;
  /// Points re-evaluated at a 10x tighter tolerance after a certificate.
  int recheck_points = 10;
  /// Initial states of the two legs.
  State init{2.0, 1.0};
  State init_tilde{1.0, 0.0};
  /// Spacing of the recorded times; must be a multiple of path.dt.
  double output_dt = 0.1;
  std::vector<double> moment_times{1.0, 2.0};
  std::size_t moment_paths = 100000;
  double moment_dt = 0.01;
  double marginal_t = 1.0;
  std::size_t marginal_paths = 10000;
  YScheme marginal_scheme = YScheme::EXACT_CIR;
  std::size_t resamples = 1000;
  /// Coupled and single path CSVs written to paths/.
  std::size_t write_paths = 0;
  /// The parsed document, echoed into the manifest.
  Json source;

  LyapunovShape shape() const;
  std::int64_t record_every() const;
};

/// Parses and validates a configuration document. Throws ConfigError naming
/// the offending field; unknown fields are rejected.
ExperimentConfig parse_config(const Json& doc);

/// Reads a configuration file. Malformed JSON is reported as a ConfigError
/// carrying the line and column.
ExperimentConfig load_config(const std::string& path);

struct RunOptions {
  std::optional<std::string> task;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunOutcome {
  /// 0 if every assertion passed, 1 otherwise.
  int status = 0;
  std::vector<Assertion> assertions;
  Json manifest;
};

/// Runs the configured task(s), writing manifest.json and the task artifacts
/// under output_dir. Throws ConfigError if an override is invalid or
/// output_dir cannot be created.
RunOutcome run_experiment(ExperimentConfig cfg, const RunOptions& options);

/// Command-line entry point: --config, --task, --threads, and the RUN_SEED
/// environment override. Returns 0 on success, 1 when an assertion fails and
/// 2 for configuration errors (no artifacts written).
int run_cli(int argc, char** argv);

}  // namespace twofactor
