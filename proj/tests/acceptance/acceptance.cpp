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

// Acceptance run: one PASS/FAIL line per criterion, exit status = number of
// failed criteria. Thread count comes from TWOFACTOR_THREADS (default: all
// hardware threads); no result depends on it.

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "twofactor/certifier.hpp"
#include "twofactor/coupling.hpp"
#include "twofactor/ergodicity.hpp"
#include "twofactor/experiment.hpp"
#include "twofactor/stable.hpp"
#include "twofactor/statistics.hpp"

using namespace twofactor;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
  g_failed += o.pass ? 0 : 1;
  std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), wall);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int thread_count() {
  if (const char* env = std::getenv("TWOFACTOR_THREADS")) return std::max(1, std::atoi(env));
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentConfig config(const char* name) {
  return load_config((fs::path(TWOFACTOR_CONFIG_DIR) / name).string());
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs the certificate protocol shared by the first two criteria.
Outcome certificate_protocol(const ExperimentConfig& cfg, int threads, double limit_s,
                             std::optional<DriftCertificate>* keep) {
  const auto t0 = Clock::now();
  SearchOptions opt;
  opt.threads = threads;
  opt.zeta_slack = cfg.zeta_slack;
  const LyapunovShape shape = cfg.shape();
  const DriftCertificate cert = drift_certificate_search(cfg.model, shape, cfg.grid, cfg.quad, opt);
  const auto rc = recheck_certificate(cfg.model, shape, cert, 10, cfg.path.seed, cfg.quad);
  const double wall = seconds_since(t0);
  double worst_change_ratio = 0.0;
  bool recheck_ok = rc.size() == 10;
  for (const RecheckPoint& p : rc) {
    const double change = std::abs(p.margin_tight - p.margin);
    recheck_ok = recheck_ok && change <= p.error_bound;
    if (p.error_bound > 0.0) worst_change_ratio = std::max(worst_change_ratio, change / p.error_bound);
  }
  double max_err = 0.0;
  bool margins_ok = true;
  for (std::size_t i = 0; i < cert.margins.size(); ++i) {
    max_err = std::max(max_err, cert.quad_error[i]);
    margins_ok = margins_ok && cert.margins[i] >= -cert.quad_error[i];
  }
  // Four decades of s and all three case bands must be covered.
  double s_lo = INFINITY, s_hi = 0.0;
  std::map<CaseBand, int> bands;
  for (const CouplingPoint& p : cert.grid) {
    s_lo = std::min(s_lo, p.s);
    s_hi = std::max(s_hi, p.s);
    ++bands[case_band(shape, p.s, p.d)];
  }
  const bool grid_ok = cert.grid.size() >= 10000 && s_hi / s_lo >= 1e4 * (1 - 1e-12) &&
                       bands.size() == 3 && cert.n_y_tilde == 4;
  const bool pass = cert.zeta > 0.0 && margins_ok && recheck_ok && grid_ok && wall <= limit_s;
  if (keep) *keep = cert;
  return {pass, "zeta " + fmt(cert.zeta) + ", c " + fmt(cert.c) + ", grid " +
                    std::to_string(cert.grid.size()) + " points, s in [" + fmt(s_lo) + ", " +
                    fmt(s_hi) + "], min margin " + fmt(cert.min_margin()) + ", max quad error " +
                    fmt(max_err) + ", recheck max change/bound " + fmt(worst_change_ratio) +
                    ", wall " + fmt(wall) + " s (limit " + fmt(limit_s) + ")"};
}

std::vector<std::string> csv_files(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      out.push_back(fs::relative(e.path(), root).string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  const int threads = thread_count();
  std::printf("acceptance run with %d threads\n", threads);

  const ExperimentConfig ref = config("ww1_reference.json");
  std::optional<DriftCertificate> ww1_cert;

  report(1, "certificate existence (WW1)", [&] {
    return certificate_protocol(config("ww1_certify.json"), threads, 300.0, &ww1_cert);
  });

  report(2, "certificate existence (WW2, theta = 2 - max(alpha, beta))", [&] {
    const ExperimentConfig cfg = config("ww2_certify.json");
    const double expected_theta = 2.0 - std::max(cfg.model.alpha, cfg.model.beta);
    Outcome o = certificate_protocol(cfg, threads, 300.0, nullptr);
    if (std::abs(cfg.theta - expected_theta) > 1e-15) {
      o.pass = false;
      o.detail += ", theta mismatch";
    }
    return o;
  });

  report(3, "plain distance G0 = s + t fails, worst points in case (iii)", [&] {
    const ExperimentConfig cfg = config("ww1_g0_expected_failure.json");
    SearchOptions opt;
    opt.threads = threads;
    opt.test = TestFunction::G0;
    try {
      const DriftCertificate c = drift_certificate_search(cfg.model, cfg.shape(), cfg.grid, cfg.quad, opt);
      return Outcome{false, "search unexpectedly succeeded with zeta " + fmt(c.zeta)};
    } catch (const CertificateNotFound& e) {
      const auto& worst = e.worst_points();
      std::map<CaseBand, int> count;
      for (const PointMargin& p : worst) ++count[p.band];
      const PointMargin& w = worst.front();
      std::string detail = "search fails (best zeta " + fmt(e.best_zeta()) + "); worst point case (" +
                           to_string(w.band) + ") at y~ " + fmt(w.point.y_tilde) + ", s " +
                           fmt(w.point.s) + ", d/s " + fmt(w.point.d / w.point.s) + ", rate " +
                           fmt(w.rate) + "; bands of the " + std::to_string(worst.size()) +
                           " worst:";
      for (const auto& [band, n] : count) detail += std::string(" (") + to_string(band) + ") " + std::to_string(n);
      return Outcome{w.band == CaseBand::III, detail};
    }
  });

  report(4, "jump-integral scaling slopes", [&] {
    const std::vector<double> ss = {1e-1, 1e-2, 1e-3};
    const LyapunovShape shape(0.3);
    std::vector<double> lx;
    for (double s : ss) lx.push_back(std::log(s));
    bool pass = true;
    std::string detail;
    const auto run = [&](const char* tag, double index, bool beta_dir) {
      const StableLaw law(index);
      std::vector<std::vector<double>> parts(3);
      for (double s : ss) {
        // d = 3 s lies in case (i); sigma = -1 makes all three regions nonempty.
        const JumpComponents j = jump_components(law, shape, s, 3.0 * s, -1, beta_dir);
        parts[0].push_back(j.below.value);
        parts[1].push_back(j.band.value);
        parts[2].push_back(j.above.value);
      }
      detail += std::string(tag) + " target " + fmt(1.0 - index) + " slopes";
      int fitted = 0;
      for (const auto& p : parts) {
        // A component that vanishes at every s meets any power bound; it has
        // no slope to fit.
        if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) {
          detail += " (identically 0)";
          continue;
        }
        std::vector<double> ly;
        for (double v : p) ly.push_back(std::log(std::abs(v)));
        const double slope = fit_line(lx, ly).slope;
        pass = pass && std::abs(slope - (1.0 - index)) <= 0.05;
        detail += " " + fmt(slope);
        ++fitted;
      }
      pass = pass && fitted >= 2;
      detail += "; ";
    };
    run("alpha", ref.model.alpha, false);
    const ExperimentConfig ww2 = config("ww2_certify.json");
    run("beta", ww2.model.beta, true);
    return Outcome{pass, detail};
  });

  // Criteria 5, 6, 7 and 11 share one reference ensemble.
  std::optional<CoupledEnsemble> ens;
  double ens_wall = 0.0;
  const auto ensemble = [&]() -> const CoupledEnsemble& {
    if (!ens) {
      const auto t0 = Clock::now();
      CoupledConfig cc;
      cc.path = ref.path;
      cc.coalescence = ref.coalescence;
      cc.record_every = ref.record_every();
      ens = simulate_coupled_ensemble(ref.model, ref.init, ref.init_tilde, cc, ref.coupling,
                                      ref.n_paths, threads);
      ens_wall = seconds_since(t0);
    }
    return *ens;
  };

  report(5, "coupled decay of mean V below the certified envelope", [&] {
    if (!ww1_cert) throw std::runtime_error("no WW1 certificate");
    const auto t0 = Clock::now();
    const CoupledEnsemble& e = ensemble();
    DecayOptions opt;
    opt.zeta = ww1_cert->zeta;
    opt.lambda = ref.model.lambda;
    opt.resamples = ref.resamples;
    opt.seed = ref.path.seed;
    const DecayReport r = decay_estimate(e, ref.shape(), ww1_cert->c, opt);
    const double wall = seconds_since(t0);
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      worst_ratio = std::max(worst_ratio, r.mean_V[k] / r.bound[k]);
    }
    const bool pass = !r.degenerate && r.bound_holds && r.eta_hat > 0.0 && e.n_paths >= 10000 &&
                      e.times.back() >= 5.0 - 1e-9 && ref.path.dt <= 1e-3 && wall <= 600.0;
    return Outcome{pass, std::to_string(e.n_paths) + " paths, horizon " + fmt(e.times.back()) +
                             ", dt " + fmt(ref.path.dt) + ", bound violations " +
                             std::to_string(r.bound_violations.size()) + " of " +
                             std::to_string(r.times.size()) + ", max mean V / envelope " +
                             fmt(worst_ratio) + ", eta_hat " + fmt(r.eta_hat) + " (CI " +
                             fmt(r.eta_ci_lo) + ", " + fmt(r.eta_ci_hi) + "), envelope rate " +
                             fmt(r.eta_bound) + ", wall " + fmt(wall) + " s"};
  });

  report(6, "post-coalescence contraction exp(-lambda tau)", [&] {
    const CoupledEnsemble& e = ensemble();
    const ContractionReport r = post_coalescence_contraction(e, ref.model.lambda, 1e-6);
    return Outcome{r.pass && r.pairs > 0,
                   std::to_string(r.pairs) + " lag pairs, max relative error per unit lag " +
                       fmt(r.max_rel_error_per_unit_lag)};
  });

  report(7, "order preservation and absorption", [&] {
    const CoupledEnsemble& e = ensemble();
    const OrderReport r = order_check(e);
    // A second model with Y jumps and thinning exercises the other coupling.
    const ExperimentConfig w2 = config("ww2_certify.json");
    CoupledConfig cc;
    cc.path = ref.path;
    cc.path.t_end = 2.0;
    cc.record_every = 1;
    const CoupledEnsemble e2 = simulate_coupled_ensemble(w2.model, ref.init, ref.init_tilde, cc,
                                                         default_coupling(w2.model), 1000, threads);
    const OrderReport r2 = order_check(e2);
    return Outcome{r.pass && r2.pass,
                   "WW1: " + std::to_string(e.stats.steps) + " steps, " +
                       std::to_string(r.step_violations) + " step violations, " +
                       std::to_string(r.absorption_violations) + " absorption violations; WW2: " +
                       std::to_string(e2.stats.steps) + " steps, " +
                       std::to_string(r2.step_violations) + " / " +
                       std::to_string(r2.absorption_violations)};
  });

  report(8, "marginal law of the coupled first leg", [&] {
    CoupledConfig cc;
    cc.path = ref.path;
    cc.path.t_end = ref.marginal_t;
    cc.coalescence = ref.coalescence;
    cc.record_every = ref.record_every();
    const MarginalReport r = marginal_check(ref.model, ref.init, ref.init_tilde, cc, ref.coupling,
                                            ref.marginal_paths, ref.marginal_scheme, threads);
    return Outcome{r.ks_pass && r.mean_pass && r.n_paths >= 10000,
                   std::to_string(r.n_paths) + " paths each, KS D " + fmt(r.ks.statistic) + ", p " +
                       fmt(r.ks.p_value) + ", means " + fmt(r.coupled.mean) + " vs " +
                       fmt(r.single.mean) + " (combined se " +
                       fmt(std::hypot(r.coupled.std_error, r.single.std_error)) + ")"};
  });

  report(9, "stable noise fidelity", [&] {
    const StableLaw law(ref.model.alpha);
    const std::size_t n = 1000000;
    RandomStream rng(split_seed(ref.path.seed, 9));
    std::vector<double> z(n);
    for (double& v : z) v = sample_stable_increment(law, 1.0, rng);
    bool pass = true;
    std::string detail = "Laplace |err|/se:";
    for (double u : {0.5, 1.0, 2.0}) {
      std::vector<double> e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(-u * z[i]);
      const MeanEstimate m = mean_stderr(e);
      const double ratio = std::abs(m.mean - std::exp(law.laplace_exponent(u))) / m.std_error;
      pass = pass && ratio <= 4.0;
      detail += " " + fmt(ratio);
    }
    const double hill = hill_tail_index(z, n / 100);
    pass = pass && std::abs(hill - law.alpha()) <= 0.1;
    detail += "; Hill " + fmt(hill);
    boost::math::quadrature::tanh_sinh<double> head;
    boost::math::quadrature::exp_sinh<double> tail;
    double worst = 0.0;
    for (double z0 : {0.1, 1.0, 4.0}) {
      const auto upper = [&](const std::function<double(double)>& f) {
        return tail.integrate([&](double w) { return f(z0 + w) * law.density(z0 + w); }, 1e-14);
      };
      const double mass = upper([](double) { return 1.0; });
      const double first = upper([](double x) { return x; });
      // In t = log z the small-jump integrand is smooth; the part below 1e-60
      // is about 1e-30 relative for alpha = 1.5.
      const double var = head.integrate(
          [&](double t) {
            const double x = std::exp(t);
            return x * x * x * law.density(x);
          },
          std::log(1e-60), std::log(z0), 1e-14);
      worst = std::max({worst, std::abs(mass / levy_tail_mass(law, z0) - 1.0),
                        std::abs(first / levy_tail_first_moment(law, z0) - 1.0),
                        std::abs(var / levy_small_jump_variance(law, z0) - 1.0)});
    }
    pass = pass && worst <= 1e-8;
    detail += "; closed forms vs quadrature max rel diff " + fmt(worst);
    return Outcome{pass, detail};
  });

  report(10, "moment growth W <= W0 exp(C0 t)", [&] {
    PathConfig pc = ref.path;
    pc.dt = ref.moment_dt;
    const MomentReport r = moment_growth_check(ref.model, ref.init, ref.moment_times, pc,
                                               ref.moment_paths, threads);
    std::string detail = std::to_string(r.n_paths) + " paths, C0 " + fmt(r.c0) + ";";
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      detail += " t=" + fmt(r.times[k]) + ": mean W " + fmt(r.mean_W[k]) + " (se " +
                fmt(r.W_stderr[k]) + ") vs bound " + fmt(r.bound[k]) + ";";
    }
    return Outcome{r.pass, detail};
  });

  report(11, "Wasserstein coupling bound decays and dominates the marginal W1", [&] {
    const CoupledEnsemble& e = ensemble();
    WassersteinOptions opt;
    opt.theta = ref.theta;
    opt.resamples = ref.resamples;
    opt.seed = ref.path.seed;
    const WassersteinReport r = wasserstein_from_ensemble(e, opt);
    double worst = -INFINITY;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      const double lower = std::max(r.w1_y[k], r.w1_x[k]);
      worst = std::max(worst, lower - (r.coupling_bound[k] + 2.0 * r.coupling_stderr[k]));
    }
    return Outcome{r.decays && r.dominates,
                   "eta_hat " + fmt(r.eta_hat) + " (CI " + fmt(r.eta_ci_lo) + ", " + fmt(r.eta_ci_hi) +
                       "), max of W1 - (bound + 2 se) " + fmt(worst)};
  });

  report(12, "byte-identical CSVs on rerun", [&] {
    ExperimentConfig cfg = config("ww1_smoke.json");
    cfg.task = "all";
    const fs::path base = fs::temp_directory_path() / "twofactor_acceptance_repro";
    fs::remove_all(base);
    RunOptions opt;
    opt.threads = 1;
    cfg.output_dir = (base / "a").string();
    run_experiment(cfg, opt);
    cfg.output_dir = (base / "b").string();
    run_experiment(cfg, opt);
    const auto fa = csv_files(base / "a");
    const auto fb = csv_files(base / "b");
    bool same = !fa.empty() && fa == fb;
    std::size_t bytes = 0;
    for (const std::string& f : fa) {
      const std::string a = slurp(base / "a" / f);
      same = same && a == slurp(base / "b" / f);
      bytes += a.size();
    }
    fs::remove_all(base);
    return Outcome{same, std::to_string(fa.size()) + " CSV files, " + std::to_string(bytes) +
                             " bytes compared"};
  });

  if (ens) std::printf("reference ensemble simulated in %.1f s\n", ens_wall);
  std::printf("%d of 12 criteria failed\n", g_failed);
  return g_failed;
}
