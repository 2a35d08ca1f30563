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

#include "twofactor/coupling.hpp"
#include "twofactor/lyapunov.hpp"
#include "twofactor/model.hpp"
#include "twofactor/path.hpp"
#include "twofactor/statistics.hpp"

namespace twofactor {

struct DecayOptions {
  /// Certified rate; enables the pointwise bound check.
  std::optional<double> zeta;
  /// X contraction rate of the model.
  double lambda = 1.0;
  std::size_t resamples = 1000;
  std::uint64_t seed = 1;
  /// Bound check: mean_V - sigma_slack * stderr <= V(Delta_0) e^{-(lambda ^ zeta) t}.
  double sigma_slack = 2.0;
  /// A path counts as fully coalesced when s and |dx| are both below this.
  double coalesced_tol = 1e-10;
  /// Fit times are those where at most this fraction is fully coalesced.
  double window_max_coalesced = 0.5;
  std::size_t min_paths = 1000;
};

struct DecayReport {
  std::vector<double> times;
  std::vector<double> mean_V;
  std::vector<double> V_stderr;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<double> mean_psi;
  std::vector<double> psi_stderr;
  /// V(Delta_0) e^{-(lambda ^ zeta) t}; empty without a certificate.
  std::vector<double> bound;
  std::vector<double> coalesced_fraction;
  double theta = 0.0;
  double c = 0.0;
  double eta_hat = 0.0;
  double eta_stderr = 0.0;
  double eta_ci_lo = 0.0;
  double eta_ci_hi = 0.0;
  /// lambda ^ zeta, or NaN without a certificate.
  double eta_bound = 0.0;
  double fit_t_lo = 0.0;
  double fit_t_hi = 0.0;
  std::size_t fit_points = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;
  std::string degenerate_reason;
  bool bound_holds = true;
  /// Indices of times violating the bound check.
  std::vector<std::size_t> bound_violations;
  /// mean_psi / K <= mean_V <= K mean_psi with K = psi_equivalence_constant.
  double equivalence_constant = 0.0;
  bool equivalence_holds = true;
};

/// Ensemble means of V_{c,theta} and psi_theta of the differences, with
/// bootstrap bands over paths, and a least-squares fit of log mean_V on the
/// fit window giving eta_hat (bootstrap interval from the same resamples).
/// Throws UsageError for fewer than options.min_paths paths.
DecayReport decay_estimate(const CoupledEnsemble& ensemble, const LyapunovShape& shape, double c,
                           const DecayOptions& options);

struct WassersteinOptions {
  double theta = 0.5;
  std::size_t resamples = 1000;
  std::uint64_t seed = 1;
  double sigma_slack = 2.0;
};

struct WassersteinReport {
  std::vector<double> times;
  /// Mean psi_theta(|dY|, |dX|): an upper bound for W_psi of the two laws.
  std::vector<double> coupling_bound;
  std::vector<double> coupling_stderr;
  /// Empirical W1 between the Y (resp. X) samples of the two legs.
  std::vector<double> w1_y;
  std::vector<double> w1_x;
  double eta_hat = 0.0;
  double eta_ci_lo = 0.0;
  double eta_ci_hi = 0.0;
  std::size_t n_paths = 0;
  bool degenerate = false;
  /// coupling_bound + sigma_slack * stderr >= max(w1_y, w1_x) at every time.
  bool dominates = true;
  bool decays = false;
};

/// Coupling upper bound and marginal W1 lower-bound witnesses from one
/// coupled ensemble. The legs are the two ensembles started from the two
/// initial states.
WassersteinReport wasserstein_from_ensemble(const CoupledEnsemble& ensemble,
                                            const WassersteinOptions& options);

/// Runs the coupled ensemble and evaluates wasserstein_from_ensemble.
WassersteinReport wasserstein_decay(const ModelSpec& model, const State& init_1,
                                    const State& init_2, const CoupledConfig& cfg,
                                    const CouplingMode& mode, std::size_t n_paths,
                                    const WassersteinOptions& options, int threads = 1);

struct MomentReport {
  std::vector<double> times;
  std::vector<double> mean_W;
  std::vector<double> W_stderr;
  std::vector<double> bound;
  /// bound - mean_W.
  std::vector<double> margin;
  double c0 = 0.0;
  double w0 = 0.0;
  std::size_t n_paths = 0;
  bool pass = true;
};

/// Ensemble mean of W(Y_t, X_t) = 1 + Y_t + h(X_t) against W(y, x) e^{C0 t}.
/// Every time must be a multiple of cfg.dt; cfg.t_end is replaced by the
/// largest time. Path i uses seed split_seed(cfg.seed, i).
MomentReport moment_growth_check(const ModelSpec& model, const State& init,
                                 const std::vector<double>& times, const PathConfig& cfg,
                                 std::size_t n_paths, int threads = 1, double sigma_slack = 2.0);

struct MarginalReport {
  double t = 0.0;
  std::size_t n_paths = 0;
  KsResult ks;
  MeanEstimate coupled;
  MeanEstimate single;
  bool ks_pass = false;
  bool mean_pass = false;
};

/// Compares Y_t of the coupled leg started at `first` with Y_t of
/// independent single paths from `first` (seeds split_seed(splitmix64(seed), i)).
/// KS passes at p >= 0.01; means agree within 4 combined standard errors.
MarginalReport marginal_check(const ModelSpec& model, const State& first, const State& second,
                              const CoupledConfig& cfg, const CouplingMode& mode,
                              std::size_t n_paths, YScheme single_scheme, int threads = 1);

struct ContractionReport {
  std::size_t pairs = 0;
  double max_rel_error_per_unit_lag = 0.0;
  bool pass = true;
};

/// On every path, for consecutive recorded times after coalescence of the
/// first components, compares |dX(t + tau)| / |dX(t)| with e^{-lambda tau}.
ContractionReport post_coalescence_contraction(const CoupledEnsemble& ensemble, double lambda,
                                               double tolerance = 1e-6);

struct OrderReport {
  /// Steps ending with y < y_tilde, counted inside the simulation.
  std::int64_t step_violations = 0;
  /// Recorded states with y < y_tilde.
  std::size_t recorded_violations = 0;
  /// Recorded states after coalescence with y != y_tilde bitwise or the flag cleared.
  std::size_t absorption_violations = 0;
  bool pass = true;
};

OrderReport order_check(const CoupledEnsemble& ensemble);

}  // namespace twofactor
