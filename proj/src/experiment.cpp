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

#include "twofactor/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "twofactor/ergodicity.hpp"
#include "twofactor/errors.hpp"
#include "twofactor/version.hpp"

namespace twofactor {

namespace fs = std::filesystem;

namespace {

State state_from_json(const Json& j, const std::string& where) {
  State st;
  ObjectReader r(j, where);
  r.number("y", st.y, true);
  r.number("x", st.x, true);
  r.finish();
  if (!(st.y >= 0.0) || !std::isfinite(st.y) || !std::isfinite(st.x)) {
    throw ConfigError(where, "requires finite x and y >= 0");
  }
  return st;
}

std::size_t count_from(ObjectReader& r, const char* key, std::size_t fallback) {
  std::uint64_t v = fallback;
  r.unsigned_integer(key, v);
  return static_cast<std::size_t>(v);
}

bool is_multiple(double t, double dt) {
  const double k = std::round(t / dt);
  return std::abs(k * dt - t) <= 1e-9 * std::max(1.0, std::abs(t));
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + file.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// State shared by the tasks of one run.
class Runner {
 public:
  Runner(const ExperimentConfig& cfg, int threads) : cfg_(cfg), threads_(threads) {}

  void certify();
  void decay();
  void wasserstein();
  void moments();
  void marginal();
  void write_paths();

  std::vector<Assertion>& assertions() { return assertions_; }
  std::vector<std::string>& artifacts() { return artifacts_; }

 private:
  void check(const std::string& name, bool pass, const std::string& detail) {
    assertions_.push_back({name, pass, detail});
  }
  fs::path out(const std::string& name) {
    artifacts_.push_back(name);
    return fs::path(cfg_.output_dir) / name;
  }
  const std::optional<DriftCertificate>& certificate(bool record);
  const CoupledEnsemble& ensemble();
  CoupledConfig coupled_config() const {
    CoupledConfig cc;
    cc.path = cfg_.path;
    cc.coalescence = cfg_.coalescence;
    cc.record_every = cfg_.record_every();
    return cc;
  }

  const ExperimentConfig& cfg_;
  int threads_;
  std::vector<Assertion> assertions_;
  std::vector<std::string> artifacts_;
  bool cert_done_ = false;
  std::optional<DriftCertificate> cert_;
  std::optional<CoupledEnsemble> ens_;
};

const std::optional<DriftCertificate>& Runner::certificate(bool record) {
  if (cert_done_) return cert_;
  cert_done_ = true;
  const LyapunovShape shape = cfg_.shape();
  Json j;
  SearchOptions so;
  so.test = cfg_.test;
  so.threads = threads_;
  so.zeta_slack = cfg_.zeta_slack;
  try {
    DriftCertificate cert = drift_certificate_search(cfg_.model, shape, cfg_.grid, cfg_.quad, so);
    j = {{"found", true}};
    j.update(to_json(cert));
    bool within = true;
    for (std::size_t i = 0; i < cert.margins.size(); ++i) {
      within = within && cert.margins[i] >= -cert.quad_error[i];
    }
    Json rc = Json::array();
    bool recheck_ok = true;
    if (cfg_.recheck_points > 0 && cfg_.test == TestFunction::V) {
      const auto pts = recheck_certificate(cfg_.model, shape, cert, cfg_.recheck_points,
                                           cfg_.path.seed, cfg_.quad);
      for (const RecheckPoint& p : pts) {
        const double change = std::abs(p.margin_tight - p.margin);
        recheck_ok = recheck_ok && change <= p.error_bound;
        rc.push_back({{"y_tilde", p.point.y_tilde}, {"s", p.point.s}, {"d", p.point.d},
                      {"margin", p.margin}, {"margin_tight", p.margin_tight},
                      {"change", change}, {"error_bound", p.error_bound}});
      }
    }
    j["recheck"] = rc;
    if (record) {
      std::ostringstream d;
      d << "zeta=" << format_double(cert.zeta) << " c=" << format_double(cert.c)
        << " points=" << cert.grid.size();
      check("certificate: zeta > 0", cert.zeta > 0.0, d.str());
      check("certificate: margins >= -quad_error", within,
            "min margin " + format_double(cert.min_margin()));
      check("certificate: tighter-tolerance recheck", recheck_ok,
            std::to_string(rc.size()) + " points");
    }
    cert_ = std::move(cert);
  } catch (const CertificateNotFound& e) {
    j = {{"found", false}, {"reason", e.what()}, {"best_zeta", e.best_zeta()}};
    Json worst = Json::array();
    for (const PointMargin& p : e.worst_points()) worst.push_back(to_json(p));
    j["worst_points"] = worst;
    if (record) check("certificate: zeta > 0", false, e.what());
  } catch (const ParameterError& e) {
    j = {{"found", false}, {"reason", e.what()}};
    if (record) check("certificate: model certifiable", false, e.what());
  }
  if (record) write_text(out("certificate.json"), dump(j));
  return cert_;
}

const CoupledEnsemble& Runner::ensemble() {
  if (!ens_) {
    ens_ = simulate_coupled_ensemble(cfg_.model, cfg_.init, cfg_.init_tilde, coupled_config(),
                                     cfg_.coupling, cfg_.n_paths, threads_);
  }
  return *ens_;
}

void Runner::certify() { certificate(true); }

void Runner::decay() {
  const auto& cert = certificate(false);
  const CoupledEnsemble& ens = ensemble();
  DecayOptions opt;
  opt.lambda = cfg_.model.x_rate();
  opt.resamples = cfg_.resamples;
  opt.seed = cfg_.path.seed;
  opt.min_paths = std::min<std::size_t>(opt.min_paths, cfg_.n_paths);
  double c = 1.0;
  if (cert && cert->test == TestFunction::V) {
    opt.zeta = cert->zeta;
    c = cert->c;
  }
  const DecayReport rep = decay_estimate(ens, cfg_.shape(), c, opt);
  const OrderReport order = order_check(ens);
  Json j = to_json(rep);
  j["c_source"] = opt.zeta ? "certificate" : "default";
  j["order"] = to_json(order);
  j["coupling_stats"] = to_json(ens.stats);
  check("order preserved and Y absorbed after coalescence", order.pass,
        "step violations " + std::to_string(order.step_violations) + ", absorption violations " +
            std::to_string(order.absorption_violations));
  if (cfg_.model.kind != ModelKind::GENERAL) {
    const ContractionReport con = post_coalescence_contraction(ens, cfg_.model.x_rate());
    j["contraction"] = to_json(con);
    check("post-coalescence contraction", con.pass,
          "max relative error per unit lag " + format_double(con.max_rel_error_per_unit_lag) +
              " over " + std::to_string(con.pairs) + " pairs");
  }
  if (rep.degenerate) {
    check("decay fit", true, "degenerate: " + rep.degenerate_reason);
  } else {
    check("decay: eta_hat > 0", rep.eta_hat > 0.0, "eta_hat " + format_double(rep.eta_hat));
    if (opt.zeta) {
      check("decay: mean V below certified envelope", rep.bound_holds,
            std::to_string(rep.bound_violations.size()) + " violating times");
    }
    check("decay: V and psi means equivalent", rep.equivalence_holds,
          "K " + format_double(rep.equivalence_constant));
  }
  std::ofstream csv(out("decay.csv"), std::ios::binary);
  write_decay_csv(csv, rep);
  write_text(out("decay.json"), dump(j));
}

void Runner::wasserstein() {
  if (!(cfg_.model.kind == ModelKind::GENERAL || (cfg_.model.b > 0.0 && cfg_.model.lambda > 0.0))) {
    check("wasserstein: model hypothesis", false, "requires b > 0 and lambda > 0");
    return;
  }
  WassersteinOptions opt;
  opt.theta = cfg_.theta;
  opt.resamples = cfg_.resamples;
  opt.seed = cfg_.path.seed;
  const WassersteinReport rep = wasserstein_from_ensemble(ensemble(), opt);
  check("wasserstein: coupling bound dominates marginal W1", rep.dominates, "");
  if (rep.degenerate) {
    check("wasserstein: decay", true, "degenerate: initial states coincide");
  } else {
    check("wasserstein: decay", rep.decays,
          "eta_hat " + format_double(rep.eta_hat) + " ci [" + format_double(rep.eta_ci_lo) +
              ", " + format_double(rep.eta_ci_hi) + "]");
  }
  std::ofstream csv(out("wasserstein.csv"), std::ios::binary);
  write_wasserstein_csv(csv, rep);
  write_text(out("wasserstein.json"), dump(to_json(rep)));
}

void Runner::moments() {
  PathConfig pc = cfg_.path;
  pc.dt = cfg_.moment_dt;
  const MomentReport rep =
      moment_growth_check(cfg_.model, cfg_.init, cfg_.moment_times, pc, cfg_.moment_paths, threads_);
  check("moments: mean W below W(y, x) e^{C0 t}", rep.pass, "C0 " + format_double(rep.c0));
  write_text(out("moments.json"), dump(to_json(rep)));
}

void Runner::marginal() {
  CoupledConfig cc = coupled_config();
  cc.path.t_end = cfg_.marginal_t;
  const MarginalReport rep = marginal_check(cfg_.model, cfg_.init, cfg_.init_tilde, cc, cfg_.coupling,
                                            cfg_.marginal_paths, cfg_.marginal_scheme, threads_);
  check("marginal: KS not rejected at 1%", rep.ks_pass, "p " + format_double(rep.ks.p_value));
  check("marginal: means within 4 stderr", rep.mean_pass,
        format_double(rep.coupled.mean) + " vs " + format_double(rep.single.mean));
  write_text(out("marginal.json"), dump(to_json(rep)));
}

void Runner::write_paths() {
  if (cfg_.write_paths == 0) return;
  fs::create_directories(fs::path(cfg_.output_dir) / "paths");
  CoupledConfig cc = coupled_config();
  cc.record_every = 1;
  for (std::size_t i = 0; i < cfg_.write_paths; ++i) {
    cc.path.seed = split_seed(cfg_.path.seed, i);
    const CoupledPath cp = simulate_coupled(cfg_.model, cfg_.init, cfg_.init_tilde, cc, cfg_.coupling);
    const std::string stem = "paths/coupled_" + std::to_string(i);
    std::ofstream csv(out(stem + ".csv"), std::ios::binary);
    write_coupled_csv(csv, cp);
    write_text(out(stem + ".json"), dump(coupled_sidecar(cp)));
    const PathGrid single = simulate_path(cfg_.model, cfg_.init, cc.path);
    std::ofstream pcsv(out("paths/path_" + std::to_string(i) + ".csv"), std::ios::binary);
    write_path_csv(pcsv, single);
  }
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"certify", "decay", "wasserstein", "moments",
                                                 "marginal-check", "all"};
  return names;
}

LyapunovShape ExperimentConfig::shape() const {
  double k0 = 2.0;
  if (kappa0) {
    k0 = *kappa0;
  } else if (model.kind == ModelKind::TYPE_II) {
    k0 = feedback_kappa0(model.gamma, model.lambda);
  }
  return LyapunovShape(theta, delta, k0);
}

std::int64_t ExperimentConfig::record_every() const {
  return std::max<std::int64_t>(1, std::llround(output_dt / path.dt));
}

ExperimentConfig parse_config(const Json& doc) {
  ExperimentConfig cfg;
  ObjectReader r(doc, "");
  cfg.source = doc;
  r.string("task", cfg.task);
  r.string("output_dir", cfg.output_dir, true);
  cfg.n_paths = count_from(r, "n_paths", cfg.n_paths);
  cfg.model = model_from_json(*r.child("model", true), "model");
  cfg.coupling = default_coupling(cfg.model);

  if (const Json* j = r.child("shape")) {
    ObjectReader s(*j, "shape");
    s.number("theta", cfg.theta);
    s.number("delta", cfg.delta);
    if (s.has("kappa0")) {
      double k0 = 0.0;
      s.number("kappa0", k0);
      cfg.kappa0 = k0;
    }
    s.finish();
  }
  if (const Json* j = r.child("path")) cfg.path = path_config_from_json(*j, "path");
  if (const Json* j = r.child("coupling")) {
    ObjectReader s(*j, "coupling");
    std::string y_mode = to_string(cfg.coupling.y_mode);
    std::string x_mode = to_string(cfg.coupling.x_mode);
    s.string("y_mode", y_mode);
    s.string("x_mode", x_mode);
    s.number("eps_c", cfg.coalescence.eps_c);
    s.boolean("bridge", cfg.coalescence.bridge);
    s.finish();
    try {
      cfg.coupling.y_mode = y_coupling_from_string(y_mode);
      cfg.coupling.x_mode = x_coupling_from_string(x_mode);
      check_coupling(cfg.model, cfg.coupling);
    } catch (const ParameterError& e) {
      throw ConfigError("coupling", e.what());
    }
    if (!(cfg.coalescence.eps_c >= 0.0)) throw ConfigError("coupling.eps_c", "must be >= 0");
  }
  if (const Json* j = r.child("grid")) cfg.grid = grid_from_json(*j, "grid");
  if (const Json* j = r.child("quadrature")) cfg.quad = quadrature_from_json(*j, "quadrature");
  if (const Json* j = r.child("certify")) {
    ObjectReader s(*j, "certify");
    std::string test = "V";
    s.string("test", test);
    s.number("zeta_slack", cfg.zeta_slack);
    std::int64_t n = cfg.recheck_points;
    s.integer("recheck_points", n);
    cfg.recheck_points = static_cast<int>(n);
    s.finish();
    if (test == "V") {
      cfg.test = TestFunction::V;
    } else if (test == "G0") {
      cfg.test = TestFunction::G0;
    } else {
      throw ConfigError("certify.test", "expected \"V\" or \"G0\"");
    }
    if (!(cfg.zeta_slack >= 0.0 && cfg.zeta_slack < 1.0)) {
      throw ConfigError("certify.zeta_slack", "must lie in [0, 1)");
    }
  }
  if (const Json* j = r.child("init")) cfg.init = state_from_json(*j, "init");
  if (const Json* j = r.child("init_tilde")) cfg.init_tilde = state_from_json(*j, "init_tilde");
  r.number("output_dt", cfg.output_dt);
  if (const Json* j = r.child("moments")) {
    ObjectReader s(*j, "moments");
    s.numbers("times", cfg.moment_times);
    cfg.moment_paths = count_from(s, "n_paths", cfg.moment_paths);
    s.number("dt", cfg.moment_dt);
    s.finish();
    if (cfg.moment_times.empty()) throw ConfigError("moments.times", "must not be empty");
    if (!(cfg.moment_dt > 0.0)) throw ConfigError("moments.dt", "must be > 0");
    for (double t : cfg.moment_times) {
      if (!(t >= 0.0) || !is_multiple(t, cfg.moment_dt)) {
        throw ConfigError("moments.times", "every time must be >= 0 and a multiple of moments.dt");
      }
    }
  }
  if (const Json* j = r.child("marginal")) {
    ObjectReader s(*j, "marginal");
    s.number("t", cfg.marginal_t);
    cfg.marginal_paths = count_from(s, "n_paths", cfg.marginal_paths);
    std::string scheme = to_string(cfg.marginal_scheme);
    s.string("scheme", scheme);
    s.finish();
    try {
      cfg.marginal_scheme = y_scheme_from_string(scheme);
    } catch (const ParameterError& e) {
      throw ConfigError("marginal.scheme", e.what());
    }
    if (!(cfg.marginal_t > 0.0) || !is_multiple(cfg.marginal_t, cfg.path.dt)) {
      throw ConfigError("marginal.t", "must be > 0 and a multiple of path.dt");
    }
  }
  cfg.resamples = count_from(r, "bootstrap_resamples", cfg.resamples);
  cfg.write_paths = count_from(r, "write_paths", cfg.write_paths);
  r.finish();

  if (std::find(task_names().begin(), task_names().end(), cfg.task) == task_names().end()) {
    throw ConfigError("task", "unknown task '" + cfg.task + "'");
  }
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (cfg.n_paths == 0) throw ConfigError("n_paths", "must be >= 1");
  if (!(cfg.output_dt > 0.0) || !is_multiple(cfg.output_dt, cfg.path.dt)) {
    throw ConfigError("output_dt", "must be > 0 and a multiple of path.dt");
  }
  try {
    cfg.shape();
  } catch (const ParameterError& e) {
    throw ConfigError("shape", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": malformed JSON (" + e.what() + ")");
  }
  return parse_config(doc);
}

RunOutcome run_experiment(ExperimentConfig cfg, const RunOptions& options) {
  if (options.task) {
    if (std::find(task_names().begin(), task_names().end(), *options.task) == task_names().end()) {
      throw ConfigError("task", "unknown task '" + *options.task + "'");
    }
    cfg.task = *options.task;
  }
  if (options.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (options.seed) cfg.path.seed = *options.seed;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    throw ConfigError("output_dir", "cannot create '" + cfg.output_dir + "'");
  }

  const auto start = std::chrono::steady_clock::now();
  Runner runner(cfg, options.threads);
  const bool all = cfg.task == "all";
  std::string error;
  try {
    if (all || cfg.task == "certify") runner.certify();
    if (all || cfg.task == "decay") runner.decay();
    if (all || cfg.task == "wasserstein") runner.wasserstein();
    if (all || cfg.task == "moments") runner.moments();
    if (all || cfg.task == "marginal-check") runner.marginal();
    runner.write_paths();
  } catch (const std::exception& e) {
    error = e.what();
    runner.assertions().push_back({"task completed", false, error});
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunOutcome outcome;
  outcome.assertions = runner.assertions();
  outcome.status = 0;
  Json asserts = Json::array();
  for (const Assertion& a : outcome.assertions) {
    if (!a.pass) outcome.status = 1;
    asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  }
  Json config = cfg.source;
  config["task"] = cfg.task;
  if (!config.contains("path")) config["path"] = Json::object();
  config["path"]["seed"] = cfg.path.seed;
  outcome.manifest = {{"version", kVersion},
                      {"task", cfg.task},
                      {"seed", cfg.path.seed},
                      {"threads", options.threads},
                      {"wall_time_s", wall},
                      {"status", outcome.status},
                      {"assertions", asserts},
                      {"artifacts", runner.artifacts()},
                      {"config", config}};
  write_text(fs::path(cfg.output_dir) / "manifest.json", dump(outcome.manifest));
  return outcome;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Coupling, drift-certificate and ergodicity experiments for two-factor models"};
  std::string config_path;
  std::string task;
  int threads = 1;
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--task", task, "Task override")
      ->check(CLI::IsMember(task_names()));
  app.add_option("--threads", threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);
  app.footer("Environment: RUN_SEED overrides path.seed.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunOptions options;
  options.threads = threads;
  if (!task.empty()) options.task = task;
  try {
    if (const char* env = std::getenv("RUN_SEED")) {
      const std::string text(env);
      std::size_t used = 0;
      unsigned long long value = 0;
      try {
        value = std::stoull(text, &used, 10);
      } catch (const std::exception&) {
        used = 0;
      }
      if (text.empty() || used != text.size() || text[0] == '-') {
        throw ConfigError("RUN_SEED", "expected a nonnegative integer, got '" + text + "'");
      }
      options.seed = value;
    }
    const ExperimentConfig cfg = load_config(config_path);
    const RunOutcome outcome = run_experiment(cfg, options);
    for (const Assertion& a : outcome.assertions) {
      std::cout << (a.pass ? "PASS " : "FAIL ") << a.name;
      if (!a.detail.empty()) std::cout << " (" << a.detail << ")";
      std::cout << '\n';
    }
    return outcome.status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace twofactor
