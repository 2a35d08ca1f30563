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

#include "twofactor/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twofactor/errors.hpp"
#include "twofactor/parallel.hpp"

namespace twofactor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// -slope of log(values) against times over the given indices, NaN if any
/// value is not positive.
double log_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                      const std::vector<std::size_t>& idx, double* stderr_out = nullptr) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i : idx) {
    if (!(values[i] > 0.0)) return kNaN;
    x.push_back(times[i]);
    y.push_back(std::log(values[i]));
  }
  const LineFit fit = fit_line(x, y);
  if (stderr_out) *stderr_out = fit.slope_stderr;
  return -fit.slope;
}

/// Percentile interval and standard deviation of the finite entries.
void summarize(const std::vector<double>& draws, double* lo, double* hi, double* sd) {
  std::vector<double> finite;
  for (double v : draws) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (finite.size() < 2) {
    *lo = *hi = kNaN;
    if (sd) *sd = kNaN;
    return;
  }
  *lo = quantile(finite, 0.025);
  *hi = quantile(finite, 0.975);
  if (sd) *sd = mean_stderr(finite).std_error * std::sqrt(static_cast<double>(finite.size()));
}

}  // namespace

DecayReport decay_estimate(const CoupledEnsemble& ens, const LyapunovShape& shape, double c,
                           const DecayOptions& options) {
  if (ens.n_paths < options.min_paths) {
    throw UsageError("decay_estimate requires at least " + std::to_string(options.min_paths) +
                     " paths, got " + std::to_string(ens.n_paths));
  }
  const std::size_t n_t = ens.times.size();
  DecayReport rep;
  rep.times = ens.times;
  rep.theta = shape.theta();
  rep.c = c;
  rep.n_paths = ens.n_paths;
  rep.seed = options.seed;

  PathMatrix mv{ens.n_paths, n_t, std::vector<double>(ens.n_paths * n_t)};
  PathMatrix mp{ens.n_paths, n_t, std::vector<double>(ens.n_paths * n_t)};
  rep.coalesced_fraction.assign(n_t, 0.0);
  for (std::size_t p = 0; p < ens.n_paths; ++p) {
    for (std::size_t k = 0; k < n_t; ++k) {
      const CoupledState& st = ens.at(p, k);
      const double d = std::abs(st.dx);
      mv.data[p * n_t + k] = V_eval(shape, c, st.s, d).value;
      mp.data[p * n_t + k] = psi_theta(shape.theta(), st.s, d);
      if (st.s <= options.coalesced_tol && d <= options.coalesced_tol) {
        rep.coalesced_fraction[k] += 1.0;
      }
    }
  }
  for (double& f : rep.coalesced_fraction) f /= static_cast<double>(ens.n_paths);

  // Mean V over the initial state is exact (all paths share it), so the fit
  // window is fixed before resampling.
  std::vector<double> full_mean(n_t, 0.0);
  for (std::size_t p = 0; p < ens.n_paths; ++p) {
    for (std::size_t k = 0; k < n_t; ++k) full_mean[k] += mv(p, k);
  }
  std::vector<std::size_t> window;
  for (std::size_t k = 0; k < n_t; ++k) {
    if (rep.coalesced_fraction[k] <= options.window_max_coalesced && full_mean[k] > 0.0) {
      window.push_back(k);
    }
  }
  rep.fit_points = window.size();
  if (!window.empty()) {
    rep.fit_t_lo = ens.times[window.front()];
    rep.fit_t_hi = ens.times[window.back()];
  }
  if (full_mean[0] == 0.0) {
    rep.degenerate = true;
    rep.degenerate_reason = "initial pair coincides; V vanishes identically";
  } else if (window.size() < 2) {
    rep.degenerate = true;
    rep.degenerate_reason = "fewer than two fit times before full coalescence";
  } else if (rep.coalesced_fraction[window.front()] > 0.99) {
    rep.degenerate = true;
    rep.degenerate_reason = "more than 99% of paths coalesced inside the fit window";
  }

  std::function<double(const std::vector<double>&)> stat;
  if (!rep.degenerate) {
    stat = [&](const std::vector<double>& means) {
      return log_decay_rate(ens.times, means, window);
    };
  }
  const BootstrapColumns bv = bootstrap_columns(mv, options.resamples, options.seed, stat);
  const BootstrapColumns bp = bootstrap_columns(mp, options.resamples, splitmix64(options.seed));
  rep.mean_V = bv.mean;
  rep.V_stderr = bv.std_error;
  rep.ci_lo = bv.ci_lo;
  rep.ci_hi = bv.ci_hi;
  rep.mean_psi = bp.mean;
  rep.psi_stderr = bp.std_error;

  if (rep.degenerate) {
    rep.eta_hat = rep.eta_stderr = rep.eta_ci_lo = rep.eta_ci_hi = kNaN;
  } else {
    rep.eta_hat = log_decay_rate(ens.times, rep.mean_V, window);
    summarize(bv.statistic, &rep.eta_ci_lo, &rep.eta_ci_hi, &rep.eta_stderr);
  }

  rep.eta_bound = kNaN;
  if (options.zeta) {
    rep.eta_bound = std::min(options.lambda, *options.zeta);
    rep.bound.resize(n_t);
    for (std::size_t k = 0; k < n_t; ++k) {
      rep.bound[k] = rep.mean_V[0] * std::exp(-rep.eta_bound * ens.times[k]);
      const double lower = rep.mean_V[k] - options.sigma_slack * rep.V_stderr[k];
      if (lower > rep.bound[k] * (1.0 + 1e-12)) rep.bound_violations.push_back(k);
    }
    rep.bound_holds = rep.bound_violations.empty();
  }

  rep.equivalence_constant = psi_equivalence_constant(shape, c);
  const double k_eq = rep.equivalence_constant;
  for (std::size_t k = 0; k < n_t; ++k) {
    const double v = rep.mean_V[k];
    const double p = rep.mean_psi[k];
    if (v > k_eq * p * (1.0 + 1e-12) || p > k_eq * v * (1.0 + 1e-12)) rep.equivalence_holds = false;
  }
  return rep;
}

WassersteinReport wasserstein_from_ensemble(const CoupledEnsemble& ens,
                                            const WassersteinOptions& options) {
  const std::size_t n_t = ens.times.size();
  const std::size_t n = ens.n_paths;
  if (n == 0) throw UsageError("wasserstein_from_ensemble requires at least one path");
  WassersteinReport rep;
  rep.times = ens.times;
  rep.n_paths = n;
  PathMatrix mp{n, n_t, std::vector<double>(n * n_t)};
  rep.w1_y.resize(n_t);
  rep.w1_x.resize(n_t);
  std::vector<double> ya(n), yb(n), xa(n), xb(n);
  for (std::size_t k = 0; k < n_t; ++k) {
    for (std::size_t p = 0; p < n; ++p) {
      const CoupledState& st = ens.at(p, k);
      mp.data[p * n_t + k] = psi_theta(options.theta, st.s, std::abs(st.dx));
      ya[p] = st.y();
      yb[p] = st.y_tilde;
      xa[p] = st.x();
      xb[p] = st.x_tilde;
    }
    rep.w1_y[k] = empirical_w1_1d(ya, yb);
    rep.w1_x[k] = empirical_w1_1d(xa, xb);
  }

  std::vector<std::size_t> window;
  std::vector<double> full(n_t, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < n_t; ++k) full[k] += mp(p, k);
  }
  for (std::size_t k = 0; k < n_t; ++k) {
    if (full[k] > 0.0) window.push_back(k);
  }
  rep.degenerate = window.size() < 2;
  std::function<double(const std::vector<double>&)> stat;
  if (!rep.degenerate) {
    stat = [&](const std::vector<double>& means) {
      return log_decay_rate(ens.times, means, window);
    };
  }
  const BootstrapColumns b = bootstrap_columns(mp, options.resamples, options.seed, stat);
  rep.coupling_bound = b.mean;
  rep.coupling_stderr = b.std_error;
  if (rep.degenerate) {
    rep.eta_hat = rep.eta_ci_lo = rep.eta_ci_hi = kNaN;
  } else {
    rep.eta_hat = log_decay_rate(ens.times, rep.coupling_bound, window);
    summarize(b.statistic, &rep.eta_ci_lo, &rep.eta_ci_hi, nullptr);
    rep.decays = rep.eta_hat > 0.0 && rep.eta_ci_lo > 0.0;
  }
  for (std::size_t k = 0; k < n_t; ++k) {
    const double top = rep.coupling_bound[k] + options.sigma_slack * rep.coupling_stderr[k];
    const double witness = std::max(rep.w1_y[k], rep.w1_x[k]);
    if (witness > top * (1.0 + 1e-12) + 1e-300) rep.dominates = false;
  }
  return rep;
}

WassersteinReport wasserstein_decay(const ModelSpec& model, const State& init_1,
                                    const State& init_2, const CoupledConfig& cfg,
                                    const CouplingMode& mode, std::size_t n_paths,
                                    const WassersteinOptions& options, int threads) {
  const CoupledEnsemble ens =
      simulate_coupled_ensemble(model, init_1, init_2, cfg, mode, n_paths, threads);
  return wasserstein_from_ensemble(ens, options);
}

MomentReport moment_growth_check(const ModelSpec& model, const State& init,
                                 const std::vector<double>& times, const PathConfig& cfg,
                                 std::size_t n_paths, int threads, double sigma_slack) {
  if (times.empty()) throw UsageError("moment_growth_check requires at least one time");
  if (n_paths == 0) throw UsageError("moment_growth_check requires at least one path");
  PathConfig local = cfg;
  local.t_end = *std::max_element(times.begin(), times.end());
  std::vector<std::size_t> index;
  for (double t : times) {
    if (!(t >= 0.0)) throw ParameterError("moment times must be >= 0");
    const double k = std::round(t / cfg.dt);
    if (std::abs(k * cfg.dt - t) > 1e-9 * std::max(1.0, t)) {
      throw ParameterError("moment time " + format_double(t) + " is not a multiple of dt");
    }
    index.push_back(static_cast<std::size_t>(k));
  }
  if (local.t_end > 0.0) local.steps();

  MomentReport rep;
  rep.times = times;
  rep.n_paths = n_paths;
  rep.c0 = moment_bound_coeff(model);
  rep.w0 = moment_weight(init.y, init.x);
  const std::size_t n_t = times.size();
  std::vector<double> values(n_paths * n_t);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    PathConfig pc = local;
    pc.seed = split_seed(cfg.seed, i);
    if (local.t_end == 0.0) {
      for (std::size_t k = 0; k < n_t; ++k) values[i * n_t + k] = rep.w0;
      return;
    }
    const PathGrid path = simulate_path(model, init, pc);
    for (std::size_t k = 0; k < n_t; ++k) {
      const State& st = path.states[index[k]];
      values[i * n_t + k] = moment_weight(st.y, st.x);
    }
  });
  std::vector<double> col(n_paths);
  for (std::size_t k = 0; k < n_t; ++k) {
    for (std::size_t i = 0; i < n_paths; ++i) col[i] = values[i * n_t + k];
    const MeanEstimate est = mean_stderr(col);
    const double bound = rep.w0 * std::exp(rep.c0 * times[k]);
    rep.mean_W.push_back(est.mean);
    rep.W_stderr.push_back(est.std_error);
    rep.bound.push_back(bound);
    rep.margin.push_back(bound - est.mean);
    if (est.mean - sigma_slack * est.std_error > bound) rep.pass = false;
  }
  return rep;
}

MarginalReport marginal_check(const ModelSpec& model, const State& first, const State& second,
                              const CoupledConfig& cfg, const CouplingMode& mode,
                              std::size_t n_paths, YScheme single_scheme, int threads) {
  if (n_paths < 2) throw UsageError("marginal_check requires at least two paths");
  CoupledConfig cc = cfg;
  cc.record_every = std::max<std::int64_t>(1, cfg.path.steps());
  const CoupledEnsemble ens =
      simulate_coupled_ensemble(model, first, second, cc, mode, n_paths, threads);
  const std::size_t last = ens.times.size() - 1;
  std::vector<double> coupled(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const CoupledState& st = ens.at(p, last);
    coupled[p] = ens.swapped ? st.y_tilde : st.y();
  }
  std::vector<double> single(n_paths);
  const std::uint64_t base = splitmix64(cfg.path.seed);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    PathConfig pc = cfg.path;
    pc.scheme = single_scheme;
    pc.seed = split_seed(base, i);
    single[i] = simulate_path(model, first, pc).states.back().y;
  });
  MarginalReport rep;
  rep.t = cfg.path.t_end;
  rep.n_paths = n_paths;
  rep.ks = ks_two_sample(coupled, single);
  rep.coupled = mean_stderr(coupled);
  rep.single = mean_stderr(single);
  rep.ks_pass = rep.ks.p_value >= 0.01;
  const double se = std::hypot(rep.coupled.std_error, rep.single.std_error);
  rep.mean_pass = std::abs(rep.coupled.mean - rep.single.mean) <= 4.0 * se;
  return rep;
}

ContractionReport post_coalescence_contraction(const CoupledEnsemble& ens, double lambda,
                                               double tolerance) {
  ContractionReport rep;
  const std::size_t n_t = ens.times.size();
  for (std::size_t p = 0; p < ens.n_paths; ++p) {
    for (std::size_t k = 0; k + 1 < n_t; ++k) {
      const CoupledState& a = ens.at(p, k);
      if (!a.coalesced || a.dx == 0.0) continue;
      const CoupledState& b = ens.at(p, k + 1);
      const double tau = ens.times[k + 1] - ens.times[k];
      const double expected = std::exp(-lambda * tau);
      const double ratio = std::abs(b.dx) / std::abs(a.dx);
      const double err = std::abs(ratio - expected) / expected / tau;
      rep.max_rel_error_per_unit_lag = std::max(rep.max_rel_error_per_unit_lag, err);
      ++rep.pairs;
    }
  }
  rep.pass = rep.max_rel_error_per_unit_lag <= tolerance;
  return rep;
}

OrderReport order_check(const CoupledEnsemble& ens) {
  OrderReport rep;
  rep.step_violations = ens.stats.order_violations;
  const std::size_t n_t = ens.times.size();
  for (std::size_t p = 0; p < ens.n_paths; ++p) {
    bool merged = false;
    for (std::size_t k = 0; k < n_t; ++k) {
      const CoupledState& st = ens.at(p, k);
      if (!(st.y() >= st.y_tilde) || !(st.s >= 0.0)) ++rep.recorded_violations;
      if (merged && (!st.coalesced || st.y() != st.y_tilde || st.s != 0.0)) {
        ++rep.absorption_violations;
      }
      merged = merged || st.coalesced;
    }
  }
  rep.pass = rep.step_violations == 0 && rep.recorded_violations == 0 &&
             rep.absorption_violations == 0;
  return rep;
}

}  // namespace twofactor
