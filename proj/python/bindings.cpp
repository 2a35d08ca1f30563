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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "twofactor/certifier.hpp"
#include "twofactor/coupling.hpp"
#include "twofactor/errors.hpp"
#include "twofactor/experiment.hpp"
#include "twofactor/lyapunov.hpp"
#include "twofactor/model.hpp"
#include "twofactor/path.hpp"
#include "twofactor/serialization.hpp"
#include "twofactor/stable.hpp"
#include "twofactor/statistics.hpp"
#include "twofactor/version.hpp"

namespace py = pybind11;
using namespace twofactor;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ModelSpec model_from_dict(const py::dict& d) {
  const py::module_ json = py::module_::import("json");
  const std::string text = py::str(json.attr("dumps")(d));
  return model_from_json(Json::parse(text));
}

py::object to_python(const Json& j) {
  const py::module_ json = py::module_::import("json");
  return json.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_twofactor, m) {
  m.doc() = "Two-factor stable-driven models: sampling, couplings and drift certificates";
  m.attr("__version__") = kVersion;

  static py::exception<Error> error(m, "Error");
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<UsageError>(m, "UsageError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<CertificateNotFound>(m, "CertificateNotFound", error.ptr());
  py::register_exception<NumericAccuracyError>(m, "NumericAccuracyError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());

  py::class_<StableLaw>(m, "StableLaw")
      .def(py::init<double>(), py::arg("alpha"))
      .def_property_readonly("alpha", &StableLaw::alpha)
      .def_property_readonly("c_alpha", &StableLaw::c_alpha)
      .def("laplace_exponent", &StableLaw::laplace_exponent, py::arg("u"))
      .def("tail_mass", [](const StableLaw& l, double z0) { return levy_tail_mass(l, z0); })
      .def("tail_first_moment",
           [](const StableLaw& l, double z0) { return levy_tail_first_moment(l, z0); })
      .def("small_jump_variance",
           [](const StableLaw& l, double eps) { return levy_small_jump_variance(l, eps); });

  m.def(
      "sample_stable",
      [](double alpha, double dt, std::size_t n, std::uint64_t seed) {
        const StableLaw law(alpha);
        RandomStream rng(seed);
        std::vector<double> out(n);
        for (double& v : out) v = sample_stable_increment(law, dt, rng);
        return to_array(out);
      },
      py::arg("alpha"), py::arg("dt"), py::arg("n"), py::arg("seed"),
      "n increments of the compensated spectrally positive stable process.");

  m.def(
      "validate_model", [](const py::dict& d) { return to_python(to_json(model_from_dict(d))); },
      py::arg("model"), "Validates a model dict and returns its normalized form.");
  m.def(
      "moment_bound_coeff", [](const py::dict& d) { return moment_bound_coeff(model_from_dict(d)); },
      py::arg("model"));

  py::class_<LyapunovShape>(m, "LyapunovShape")
      .def(py::init<double, double, double>(), py::arg("theta"), py::arg("delta") = 1.0,
           py::arg("kappa0") = 2.0)
      .def_property_readonly("theta", &LyapunovShape::theta)
      .def_property_readonly("delta", &LyapunovShape::delta)
      .def_property_readonly("kappa0", &LyapunovShape::kappa0)
      .def("g", [](const LyapunovShape& s, double r) { return g_eval(s, r).value; })
      .def("F", [](const LyapunovShape& s, double a, double t) { return F_eval(s, a, t).value; })
      .def("V", [](const LyapunovShape& s, double c, double a, double t) {
        return V_eval(s, c, a, t).value;
      });
  m.def("psi_theta", &psi_theta, py::arg("theta"), py::arg("u"), py::arg("v"));

  m.def(
      "coupling_generator_value",
      [](const py::dict& d, const LyapunovShape& shape, double c, double y_tilde, double s,
         double dist) {
        const Estimate e =
            coupling_generator_value(model_from_dict(d), shape, c, {y_tilde, s, dist});
        return py::make_tuple(e.value, e.error);
      },
      py::arg("model"), py::arg("shape"), py::arg("c"), py::arg("y_tilde"), py::arg("s"),
      py::arg("d"), "L*V at one point as (value, error bound).");

  m.def(
      "certify",
      [](const py::dict& d, const LyapunovShape& shape, int n_s) {
        GridSpec grid;
        grid.n_s = n_s;
        DriftCertificate cert = drift_certificate_search(model_from_dict(d), shape, grid);
        Json j = to_json(cert);
        j.erase("points");
        return to_python(j);
      },
      py::arg("model"), py::arg("shape"), py::arg("n_s") = 41,
      "Drift certificate summary (per-point margins omitted).");

  m.def(
      "simulate_path",
      [](const py::dict& d, double y0, double x0, double t_end, double dt, std::uint64_t seed,
         const std::string& scheme) {
        PathConfig cfg;
        cfg.t_end = t_end;
        cfg.dt = dt;
        cfg.seed = seed;
        cfg.scheme = y_scheme_from_string(scheme);
        const PathGrid p = simulate_path(model_from_dict(d), {y0, x0}, cfg);
        std::vector<double> y, x;
        for (const State& s : p.states) {
          y.push_back(s.y);
          x.push_back(s.x);
        }
        py::dict out;
        out["t"] = to_array(p.times);
        out["y"] = to_array(y);
        out["x"] = to_array(x);
        out["truncations"] = p.truncations;
        return out;
      },
      py::arg("model"), py::arg("y0"), py::arg("x0"), py::arg("t_end"), py::arg("dt"),
      py::arg("seed"), py::arg("scheme") = "EXACT_CIR");

  m.def(
      "simulate_coupled",
      [](const py::dict& d, std::pair<double, double> first, std::pair<double, double> second,
         double t_end, double dt, std::uint64_t seed, const std::string& x_mode) {
        const ModelSpec spec = model_from_dict(d);
        CoupledConfig cfg;
        cfg.path.t_end = t_end;
        cfg.path.dt = dt;
        cfg.path.seed = seed;
        CouplingMode mode = default_coupling(spec);
        mode.x_mode = x_coupling_from_string(x_mode);
        const CoupledPath p = simulate_coupled(spec, {first.first, first.second},
                                               {second.first, second.second}, cfg, mode);
        std::vector<double> y, yt, x, xt;
        for (const CoupledState& s : p.states) {
          y.push_back(s.y());
          yt.push_back(s.y_tilde);
          x.push_back(s.x());
          xt.push_back(s.x_tilde);
        }
        py::dict out;
        out["t"] = to_array(p.times);
        out["y"] = to_array(y);
        out["y_tilde"] = to_array(yt);
        out["x"] = to_array(x);
        out["x_tilde"] = to_array(xt);
        out["T_Y"] = p.t_y;
        out["swapped"] = p.swapped;
        return out;
      },
      py::arg("model"), py::arg("first"), py::arg("second"), py::arg("t_end"), py::arg("dt"),
      py::arg("seed"), py::arg("x_mode") = "THINNING");

  m.def("empirical_w1_1d", &empirical_w1_1d, py::arg("a"), py::arg("b"));
  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const KsResult r = ks_two_sample(a, b);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "run_config",
      [](const std::string& path, const std::string& task, int threads) {
        RunOptions opt;
        opt.threads = threads;
        if (!task.empty()) opt.task = task;
        const RunOutcome out = run_experiment(load_config(path), opt);
        return py::make_tuple(out.status, to_python(out.manifest));
      },
      py::arg("config"), py::arg("task") = "", py::arg("threads") = 1,
      "Runs an experiment configuration; returns (status, manifest).");
}
