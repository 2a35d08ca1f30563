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
#include <iosfwd>
#include <string>
#include <vector>

#include "twofactor/model.hpp"
#include "twofactor/random.hpp"
#include "twofactor/stable.hpp"

namespace twofactor {

enum class YScheme { EXACT_CIR, EULER };

const char* to_string(YScheme scheme) noexcept;
YScheme y_scheme_from_string(const std::string& name);

struct PathConfig {
  double t_end = 1.0;
  double dt = 1e-3;
  YScheme scheme = YScheme::EXACT_CIR;
  std::uint64_t seed = 1;
  /// Small-jump truncation of the thinning coupling.
  double jump_eps = 0.01;

  /// Number of steps round(t_end / dt). Throws ParameterError unless
  /// t_end >= 0, dt > 0, dt <= t_end (for t_end > 0) and the count fits.
  std::int64_t steps() const;
};

struct PathGrid {
  std::vector<double> times;
  std::vector<State> states;
  /// Steps at which the Euler Y update was clamped at 0.
  std::int64_t truncations = 0;
};

/// Exact transition of dY = (a - bY)dt + sqrt(Y) dB over dt.
///
/// Y_dt = c chi'^2(4a, y e^{-b dt} / c) with c = (1 - e^{-b dt}) / (4b)
/// (dt / 4 when b = 0), sampled as the Poisson mixture 2c Gamma(2a + N),
/// N ~ Poisson(y e^{-b dt} / (2c)).
double cir_exact_step(double y, double a, double b, double dt, RandomStream& rng);

/// Euler step max(0, y + (a - b y)dt + y^{1/beta} dL); beta == 2 is a
/// Brownian driver. `truncated` (optional) reports the clamp.
double stable_cir_step(double y, double a, double b, double beta, double dt, RandomStream& rng,
                       bool* truncated = nullptr);

/// One step of dX = (kappa - lambda X - gamma Y)dt + Y^{1/alpha} dZ with the
/// noise coefficient frozen at y_prev.
///
/// The drift is integrated exactly over the step,
/// x' = x e^{-lambda dt} + (kappa - gamma y_prev)(1 - e^{-lambda dt}) / lambda
/// + y_prev^{1/alpha} dZ, so the linear part contracts by exactly
/// e^{-lambda dt} per step. alpha == 2 means a Gaussian increment.
double stable_ou_step(double x, double y_prev, double kappa, double lambda, double gamma,
                      double alpha, double dt, RandomStream& rng);

/// e^{-lambda dt} and (1 - e^{-lambda dt}) / lambda (dt when lambda == 0).
struct DriftFactors {
  double decay;
  double gain;
};
DriftFactors drift_factors(double lambda, double dt) noexcept;

/// Integrates one trajectory of a validated model on the grid 0, dt, ..., t_end.
///
/// Per step the Y update draws first, then the X update. Y uses the exact
/// CIR transition for WW1 and TYPE_II under EXACT_CIR and an Euler step
/// clamped at 0 otherwise; X uses stable_ou_step (Euler for GENERAL). TYPE_I
/// adds sqrt(y)(rho dB + sqrt(1 - rho^2) dW) to X, with dB the Y Brownian
/// increment; under EXACT_CIR the TYPE_I Y update is Euler.
PathGrid simulate_path(const ModelSpec& spec, const State& init, const PathConfig& cfg);

/// Writes `t,y,x` rows with 17 significant digits.
void write_path_csv(std::ostream& out, const PathGrid& path);

/// printf-style "%.17g".
std::string format_double(double v);

}  // namespace twofactor
