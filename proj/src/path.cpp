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

#include "twofactor/path.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>

#include "twofactor/errors.hpp"

namespace twofactor {

const char* to_string(YScheme scheme) noexcept {
  return scheme == YScheme::EXACT_CIR ? "EXACT_CIR" : "EULER";
}

YScheme y_scheme_from_string(const std::string& name) {
  if (name == "EXACT_CIR") return YScheme::EXACT_CIR;
  if (name == "EULER") return YScheme::EULER;
  throw ParameterError("unknown scheme '" + name + "'");
}

std::int64_t PathConfig::steps() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ParameterError("t_end must be finite and >= 0");
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  if (t_end == 0.0) return 0;
  if (dt > t_end * (1.0 + 1e-12)) throw ParameterError("dt must not exceed t_end");
  const double n = std::round(t_end / dt);
  if (n > 1e15) throw ParameterError("t_end / dt does not fit the step counter");
  return static_cast<std::int64_t>(n);
}

DriftFactors drift_factors(double lambda, double dt) noexcept {
  if (lambda == 0.0) return {1.0, dt};
  const double decay = std::exp(-lambda * dt);
  return {decay, -std::expm1(-lambda * dt) / lambda};
}

double cir_exact_step(double y, double a, double b, double dt, RandomStream& rng) {
  if (!(y >= 0.0)) throw DomainError("cir_exact_step requires y >= 0");
  if (!(dt > 0.0)) throw DomainError("cir_exact_step requires dt > 0");
  if (!(a >= 0.0)) throw DomainError("cir_exact_step requires a >= 0");
  const double e = std::exp(-b * dt);
  const double c = b == 0.0 ? 0.25 * dt : -std::expm1(-b * dt) / (4.0 * b);
  const double noncentral = y * e / c;
  const auto n = rng.poisson(0.5 * noncentral);
  const double shape = 2.0 * a + static_cast<double>(n);
  if (shape <= 0.0) return 0.0;
  return 2.0 * c * rng.gamma(shape);
}

double stable_cir_step(double y, double a, double b, double beta, double dt, RandomStream& rng,
                       bool* truncated) {
  if (!(y >= 0.0)) throw DomainError("stable_cir_step requires y >= 0");
  const double coef = beta == 2.0 ? std::sqrt(y) : std::pow(y, 1.0 / beta);
  const double noise = sample_noise_increment(beta, dt, rng);
  const double next = y + (a - b * y) * dt + coef * noise;
  if (truncated) *truncated = next < 0.0;
  return next < 0.0 ? 0.0 : next;
}

double stable_ou_step(double x, double y_prev, double kappa, double lambda, double gamma,
                      double alpha, double dt, RandomStream& rng) {
  if (!(y_prev >= 0.0)) throw DomainError("stable_ou_step requires y_prev >= 0");
  const DriftFactors f = drift_factors(lambda, dt);
  const double noise = sample_noise_increment(alpha, dt, rng);
  const double coef = alpha == 2.0 ? std::sqrt(y_prev) : std::pow(y_prev, 1.0 / alpha);
  return x * f.decay + (kappa - gamma * y_prev) * f.gain + coef * noise;
}

PathGrid simulate_path(const ModelSpec& spec, const State& init, const PathConfig& cfg) {
  if (!(init.y >= 0.0)) throw DomainError("initial y must be >= 0");
  const std::int64_t n = cfg.steps();
  const double dt = cfg.dt;
  RandomStream rng(cfg.seed);

  PathGrid path;
  path.times.reserve(static_cast<std::size_t>(n) + 1);
  path.states.reserve(static_cast<std::size_t>(n) + 1);
  path.times.push_back(0.0);
  path.states.push_back(init);

  const bool exact_y = cfg.scheme == YScheme::EXACT_CIR &&
                       (spec.kind == ModelKind::WW1 || spec.kind == ModelKind::TYPE_II);
  std::unique_ptr<StableLaw> law_x;
  std::unique_ptr<StableLaw> law_y;
  if (spec.alpha < 2.0) law_x = std::make_unique<StableLaw>(spec.alpha);
  if (spec.has_y_jumps() && spec.beta < 2.0) law_y = std::make_unique<StableLaw>(spec.beta);
  const DriftFactors fx = drift_factors(spec.x_rate(), dt);
  const double sqrt_dt = std::sqrt(dt);

  double y = init.y;
  double x = init.x;
  for (std::int64_t k = 1; k <= n; ++k) {
    double y_next;
    double db = 0.0;
    if (exact_y) {
      y_next = cir_exact_step(y, spec.a, spec.b, dt, rng);
    } else {
      double incr = spec.y_drift(y) * dt;
      if (spec.has_y_brownian()) {
        db = sqrt_dt * rng.normal();
        incr += std::sqrt(y) * db;
      }
      if (spec.has_y_jumps()) {
        if (law_y) {
          incr += std::pow(y, 1.0 / spec.beta) * sample_stable_increment(*law_y, dt, rng);
        } else {
          incr += std::sqrt(y) * sqrt_dt * rng.normal();
        }
      }
      y_next = y + incr;
      if (y_next < 0.0) {
        y_next = 0.0;
        ++path.truncations;
      }
    }

    double noise = law_x ? std::pow(y, 1.0 / spec.alpha) * sample_stable_increment(*law_x, dt, rng)
                         : std::sqrt(y) * sqrt_dt * rng.normal();
    if (spec.kind == ModelKind::TYPE_I) {
      const double dw = sqrt_dt * rng.normal();
      noise += std::sqrt(y) * (spec.rho * db + std::sqrt(1.0 - spec.rho * spec.rho) * dw);
    }
    double x_next;
    if (spec.kind == ModelKind::GENERAL) {
      x_next = x + spec.drift2(x) * dt + noise;
    } else {
      const double level = spec.kappa - (spec.kind == ModelKind::TYPE_II ? spec.gamma * y : 0.0);
      x_next = x * fx.decay + level * fx.gain + noise;
    }
    y = y_next;
    x = x_next;
    path.times.push_back(k == n ? cfg.t_end : static_cast<double>(k) * dt);
    path.states.push_back({y, x});
  }
  return path;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_path_csv(std::ostream& out, const PathGrid& path) {
  out << "t,y,x\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << format_double(path.times[i]) << ',' << format_double(path.states[i].y) << ','
        << format_double(path.states[i].x) << '\n';
  }
}

}  // namespace twofactor
