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

#include "twofactor/serialization.hpp"

#include <cmath>
#include <ostream>

#include "twofactor/errors.hpp"

namespace twofactor {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json array_of(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

Json to_json(const MonotoneDrift& d) {
  return {{"level", d.level}, {"rate", d.rate}, {"cubic", d.cubic},
          {"range_lo", d.range_lo}, {"range_hi", d.range_hi}};
}

MonotoneDrift drift_from_json(const Json& j, const std::string& where) {
  MonotoneDrift d;
  ObjectReader r(j, where);
  r.number("level", d.level);
  r.number("rate", d.rate);
  r.number("cubic", d.cubic);
  r.number("range_lo", d.range_lo);
  r.number("range_hi", d.range_hi);
  r.finish();
  return d;
}

Json point_json(const CouplingPoint& p) {
  return {{"y_tilde", p.y_tilde}, {"s", p.s}, {"d", p.d}};
}

}  // namespace

ObjectReader::ObjectReader(const Json& object, std::string where)
    : object_(object), where_(std::move(where)) {
  if (!object_.is_object()) throw ConfigError(where_, "expected a JSON object");
}

std::string ObjectReader::path(const char* key) const {
  return where_.empty() ? std::string(key) : where_ + "." + key;
}

bool ObjectReader::has(const char* key) const { return object_.contains(key); }

const Json* ObjectReader::find(const char* key, bool required) {
  seen_.insert(key);
  const auto it = object_.find(key);
  if (it == object_.end()) {
    if (required) throw ConfigError(path(key), "required field is missing");
    return nullptr;
  }
  return &*it;
}

void ObjectReader::number(const char* key, double& out, bool required) {
  if (const Json* v = find(key, required)) {
    if (!v->is_number()) throw ConfigError(path(key), "expected a number");
    out = v->get<double>();
  }
}

void ObjectReader::integer(const char* key, std::int64_t& out, bool required) {
  if (const Json* v = find(key, required)) {
    if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer");
    out = v->get<std::int64_t>();
  }
}

void ObjectReader::unsigned_integer(const char* key, std::uint64_t& out, bool required) {
  if (const Json* v = find(key, required)) {
    if (!v->is_number_unsigned()) throw ConfigError(path(key), "expected a nonnegative integer");
    out = v->get<std::uint64_t>();
  }
}

void ObjectReader::boolean(const char* key, bool& out, bool required) {
  if (const Json* v = find(key, required)) {
    if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false");
    out = v->get<bool>();
  }
}

void ObjectReader::string(const char* key, std::string& out, bool required) {
  if (const Json* v = find(key, required)) {
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    out = v->get<std::string>();
  }
}

void ObjectReader::numbers(const char* key, std::vector<double>& out, bool required) {
  if (const Json* v = find(key, required)) {
    if (!v->is_array()) throw ConfigError(path(key), "expected an array of numbers");
    out.clear();
    for (const Json& e : *v) {
      if (!e.is_number()) throw ConfigError(path(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
  }
}

const Json* ObjectReader::child(const char* key, bool required) { return find(key, required); }

void ObjectReader::finish() const {
  for (const auto& item : object_.items()) {
    if (!seen_.count(item.key())) throw ConfigError(path(item.key().c_str()), "unknown field");
  }
}

Json to_json(const ModelSpec& spec) {
  Json j = {{"kind", to_string(spec.kind)}, {"a", spec.a},         {"b", spec.b},
            {"kappa", spec.kappa},          {"lambda", spec.lambda}, {"alpha", spec.alpha}};
  if (spec.has_y_jumps()) j["beta"] = spec.beta;
  if (spec.kind == ModelKind::TYPE_I) j["rho"] = spec.rho;
  if (spec.kind == ModelKind::TYPE_II) j["gamma"] = spec.gamma;
  if (spec.kind == ModelKind::GENERAL) {
    j["drift1"] = to_json(spec.drift1);
    j["drift2"] = to_json(spec.drift2);
    j["lambda1"] = spec.lambda1;
    j["lambda2"] = spec.lambda2;
  }
  return j;
}

ModelSpec model_from_json(const Json& j, const std::string& where) {
  ModelSpec spec;
  ObjectReader r(j, where);
  std::string kind;
  r.string("kind", kind, true);
  try {
    spec.kind = model_kind_from_string(kind);
  } catch (const ParameterError& e) {
    throw ConfigError(r.path("kind"), e.what());
  }
  r.number("a", spec.a);
  r.number("b", spec.b);
  r.number("kappa", spec.kappa);
  r.number("lambda", spec.lambda);
  r.number("gamma", spec.gamma);
  r.number("rho", spec.rho);
  r.number("alpha", spec.alpha);
  r.number("beta", spec.beta);
  r.number("lambda1", spec.lambda1);
  r.number("lambda2", spec.lambda2);
  if (const Json* d = r.child("drift1")) spec.drift1 = drift_from_json(*d, r.path("drift1"));
  if (const Json* d = r.child("drift2")) spec.drift2 = drift_from_json(*d, r.path("drift2"));
  r.finish();
  try {
    return validate_model(spec);
  } catch (const ValidationError& e) {
    std::string fields;
    for (const auto& f : e.fields()) fields += (fields.empty() ? "" : ", ") + where + "." + f;
    throw ConfigError(fields, e.what());
  }
}

Json to_json(const PathConfig& cfg) {
  return {{"t_end", cfg.t_end}, {"dt", cfg.dt}, {"scheme", to_string(cfg.scheme)},
          {"seed", cfg.seed},   {"jump_eps", cfg.jump_eps}};
}

PathConfig path_config_from_json(const Json& j, const std::string& where) {
  PathConfig cfg;
  ObjectReader r(j, where);
  r.number("t_end", cfg.t_end);
  r.number("dt", cfg.dt);
  std::string scheme = to_string(cfg.scheme);
  r.string("scheme", scheme);
  r.unsigned_integer("seed", cfg.seed);
  r.number("jump_eps", cfg.jump_eps);
  r.finish();
  try {
    cfg.scheme = y_scheme_from_string(scheme);
  } catch (const ParameterError& e) {
    throw ConfigError(r.path("scheme"), e.what());
  }
  if (!(cfg.jump_eps > 0.0)) throw ConfigError(r.path("jump_eps"), "must be > 0");
  try {
    cfg.steps();
  } catch (const ParameterError& e) {
    throw ConfigError(where, e.what());
  }
  return cfg;
}

Json to_json(const GridSpec& grid) {
  return {{"s_min", grid.s_min},   {"s_max", grid.s_max},
          {"n_s", grid.n_s},       {"ratios", grid.ratios},
          {"y_tilde", grid.y_tilde}};
}

GridSpec grid_from_json(const Json& j, const std::string& where) {
  GridSpec grid;
  ObjectReader r(j, where);
  r.number("s_min", grid.s_min);
  r.number("s_max", grid.s_max);
  std::int64_t n_s = grid.n_s;
  r.integer("n_s", n_s);
  grid.n_s = static_cast<int>(n_s);
  r.numbers("ratios", grid.ratios);
  r.numbers("y_tilde", grid.y_tilde);
  r.finish();
  if (!(grid.s_min > 0.0 && grid.s_max > grid.s_min)) {
    throw ConfigError(where, "requires 0 < s_min < s_max");
  }
  if (grid.n_s < 2) throw ConfigError(r.path("n_s"), "must be >= 2");
  if (grid.y_tilde.empty()) throw ConfigError(r.path("y_tilde"), "must not be empty");
  return grid;
}

Json to_json(const QuadratureConfig& quad) {
  return {{"rel_tol", quad.rel_tol}, {"abs_tol", quad.abs_tol}, {"max_depth", quad.max_depth}};
}

QuadratureConfig quadrature_from_json(const Json& j, const std::string& where) {
  QuadratureConfig quad;
  ObjectReader r(j, where);
  r.number("rel_tol", quad.rel_tol);
  r.number("abs_tol", quad.abs_tol);
  std::uint64_t depth = quad.max_depth;
  r.unsigned_integer("max_depth", depth);
  quad.max_depth = static_cast<unsigned>(depth);
  r.finish();
  if (!(quad.rel_tol > 0.0) || !(quad.abs_tol > 0.0)) {
    throw ConfigError(where, "tolerances must be > 0");
  }
  return quad;
}

Json to_json(const PointMargin& p) {
  return {{"y_tilde", p.point.y_tilde}, {"s", p.point.s},      {"d", p.point.d},
          {"band", to_string(p.band)},  {"rate", p.rate},      {"rate_error", p.rate_error}};
}

Json to_json(const DriftCertificate& cert) {
  Json j = {{"model", cert.model},
            {"test", cert.test == TestFunction::V ? "V" : "G0"},
            {"flags", cert.flags},
            {"theta", cert.theta},
            {"delta", cert.delta},
            {"kappa0", cert.kappa0},
            {"c", cert.c},
            {"c_seed", cert.c_seed},
            {"remainder_constant", cert.remainder_constant},
            {"zeta", cert.zeta},
            {"min_margin", cert.min_margin()},
            {"lemma_c0", cert.lemma_c0},
            {"quad_tol", cert.quad_tol},
            {"n_s", cert.n_s},
            {"n_ratio", cert.n_ratio},
            {"n_y_tilde", cert.n_y_tilde},
            {"n_points", cert.grid.size()}};
  if (!cert.grid.empty()) {
    j["worst_point"] = point_json(cert.grid[cert.worst_index]);
    j["worst_point"]["margin"] = cert.margins[cert.worst_index];
    j["worst_point"]["quad_error"] = cert.quad_error[cert.worst_index];
  }
  Json pts = Json::array();
  for (std::size_t i = 0; i < cert.grid.size(); ++i) {
    const CouplingPoint& p = cert.grid[i];
    pts.push_back(Json::array({p.y_tilde, p.s, p.d, cert.margins[i], cert.quad_error[i]}));
  }
  j["points_columns"] = {"y_tilde", "s", "d", "margin", "quad_error"};
  j["points"] = std::move(pts);
  return j;
}

Json to_json(const CouplingStats& s) {
  return {{"steps", s.steps},
          {"reflect_steps", s.reflect_steps},
          {"sync_steps", s.sync_steps},
          {"coalesced_steps", s.coalesced_steps},
          {"y_tilde_truncations", s.y_tilde_truncations},
          {"threshold_hits", s.threshold_hits},
          {"bridge_hits", s.bridge_hits},
          {"order_violations", s.order_violations}};
}

Json to_json(const DecayReport& rep) {
  Json j = {{"n_paths", rep.n_paths},
            {"seed", rep.seed},
            {"theta", rep.theta},
            {"c", rep.c},
            {"eta_hat", number_or_null(rep.eta_hat)},
            {"eta_stderr", number_or_null(rep.eta_stderr)},
            {"eta_ci", {number_or_null(rep.eta_ci_lo), number_or_null(rep.eta_ci_hi)}},
            {"eta_bound", number_or_null(rep.eta_bound)},
            {"fit_window", {rep.fit_t_lo, rep.fit_t_hi}},
            {"fit_points", rep.fit_points},
            {"degenerate", rep.degenerate},
            {"degenerate_reason", rep.degenerate_reason},
            {"bound_holds", rep.bound_holds},
            {"bound_violations", rep.bound_violations},
            {"equivalence_constant", rep.equivalence_constant},
            {"equivalence_holds", rep.equivalence_holds},
            {"times", array_of(rep.times)},
            {"mean_V", array_of(rep.mean_V)},
            {"V_stderr", array_of(rep.V_stderr)},
            {"ci_lo", array_of(rep.ci_lo)},
            {"ci_hi", array_of(rep.ci_hi)},
            {"mean_psi", array_of(rep.mean_psi)},
            {"psi_stderr", array_of(rep.psi_stderr)},
            {"bound", array_of(rep.bound)},
            {"coalesced_fraction", array_of(rep.coalesced_fraction)}};
  return j;
}

Json to_json(const WassersteinReport& rep) {
  return {{"n_paths", rep.n_paths},
          {"eta_hat", number_or_null(rep.eta_hat)},
          {"eta_ci", {number_or_null(rep.eta_ci_lo), number_or_null(rep.eta_ci_hi)}},
          {"degenerate", rep.degenerate},
          {"dominates", rep.dominates},
          {"decays", rep.decays},
          {"times", array_of(rep.times)},
          {"coupling_bound", array_of(rep.coupling_bound)},
          {"coupling_stderr", array_of(rep.coupling_stderr)},
          {"w1_y", array_of(rep.w1_y)},
          {"w1_x", array_of(rep.w1_x)}};
}

Json to_json(const MomentReport& rep) {
  return {{"n_paths", rep.n_paths},          {"c0", rep.c0},
          {"w0", rep.w0},                    {"pass", rep.pass},
          {"times", array_of(rep.times)},    {"mean_W", array_of(rep.mean_W)},
          {"W_stderr", array_of(rep.W_stderr)}, {"bound", array_of(rep.bound)},
          {"margin", array_of(rep.margin)}};
}

Json to_json(const MarginalReport& rep) {
  return {{"t", rep.t},
          {"n_paths", rep.n_paths},
          {"ks_statistic", rep.ks.statistic},
          {"ks_p_value", rep.ks.p_value},
          {"mean_coupled", rep.coupled.mean},
          {"stderr_coupled", rep.coupled.std_error},
          {"mean_single", rep.single.mean},
          {"stderr_single", rep.single.std_error},
          {"ks_pass", rep.ks_pass},
          {"mean_pass", rep.mean_pass}};
}

Json to_json(const ContractionReport& rep) {
  return {{"pairs", rep.pairs},
          {"max_rel_error_per_unit_lag", rep.max_rel_error_per_unit_lag},
          {"pass", rep.pass}};
}

Json to_json(const OrderReport& rep) {
  return {{"step_violations", rep.step_violations},
          {"recorded_violations", rep.recorded_violations},
          {"absorption_violations", rep.absorption_violations},
          {"pass", rep.pass}};
}

Json coupled_sidecar(const CoupledPath& path) {
  const CouplingStats& s = path.stats;
  const double active = static_cast<double>(s.reflect_steps + s.sync_steps);
  const double total = static_cast<double>(s.steps);
  Json j = {{"T_Y", number_or_null(path.t_y)},
            {"swapped", path.swapped},
            {"truncations", {{"y_tilde", s.y_tilde_truncations}}},
            {"branch_occupancy",
             {{"reflect", total > 0 ? static_cast<double>(s.reflect_steps) / total : 0.0},
              {"sync", total > 0 ? static_cast<double>(s.sync_steps) / total : 0.0},
              {"coalesced", total > 0 ? static_cast<double>(s.coalesced_steps) / total : 0.0}}},
            {"uncoalesced_steps", active},
            {"stats", to_json(s)}};
  return j;
}

void write_decay_csv(std::ostream& out, const DecayReport& rep) {
  out << "t,mean_V,ci_lo,ci_hi,mean_psi,bound\n";
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    out << format_double(rep.times[k]) << ',' << format_double(rep.mean_V[k]) << ','
        << format_double(rep.ci_lo[k]) << ',' << format_double(rep.ci_hi[k]) << ','
        << format_double(rep.mean_psi[k]) << ',';
    if (!rep.bound.empty()) out << format_double(rep.bound[k]);
    out << '\n';
  }
}

void write_wasserstein_csv(std::ostream& out, const WassersteinReport& rep) {
  out << "t,coupling_bound,coupling_stderr,w1_y,w1_x\n";
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    out << format_double(rep.times[k]) << ',' << format_double(rep.coupling_bound[k]) << ','
        << format_double(rep.coupling_stderr[k]) << ',' << format_double(rep.w1_y[k]) << ','
        << format_double(rep.w1_x[k]) << '\n';
  }
}

}  // namespace twofactor
