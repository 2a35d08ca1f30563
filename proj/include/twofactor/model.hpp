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

#include <string>
#include <vector>

namespace twofactor {

enum class ModelKind { WW1, WW2, MIXED_Y, TYPE_I, TYPE_II, GENERAL };

const char* to_string(ModelKind kind) noexcept;
/// Throws ParameterError for an unknown name.
ModelKind model_kind_from_string(const std::string& name);

/// Drift b(v) = level - rate * v - cubic * v^3 of the general monotone model.
/// `range_lo`/`range_hi` bound the sample on which monotonicity is checked.
struct MonotoneDrift {
  double level = 0.0;
  double rate = 0.0;
  double cubic = 0.0;
  double range_lo = -10.0;
  double range_hi = 10.0;

  double operator()(double v) const noexcept { return level - rate * v - cubic * v * v * v; }
  double derivative(double v) const noexcept { return -rate - 3.0 * cubic * v * v; }
};

/// Parameters of one two-factor system on R_+ x R.
///
///   WW1      dY = (a - bY)dt + sqrt(Y) dB,            dX = (kappa - lambda X)dt + Y^{1/alpha} dZ
///   WW2      dY = (a - bY)dt + Y^{1/beta} dL,         X as in WW1
///   MIXED_Y  dY = (a - bY)dt + sqrt(Y) dB + Y^{1/beta} dL, X as in WW1
///   TYPE_I   MIXED_Y plus sqrt(Y)(rho dB + sqrt(1 - rho^2) dW) in the X equation
///   TYPE_II  WW1 with X drift kappa - lambda X - gamma Y
///   GENERAL  dY = b1(Y)dt + Y^{1/beta} dL,            dX = b2(X)dt + Y^{1/alpha} dZ
///
/// Index 2 for alpha or beta means the corresponding driver is Brownian.
/// beta == 0 marks "absent" for kinds without a Y-jump driver.
struct ModelSpec {
  ModelKind kind = ModelKind::WW1;
  double a = 0.0;
  double b = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  double alpha = 1.5;
  double beta = 0.0;
  MonotoneDrift drift1;
  MonotoneDrift drift2;
  /// Declared monotonicity constants of drift1 / drift2 (GENERAL only).
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  bool has_y_jumps() const noexcept {
    return kind == ModelKind::WW2 || kind == ModelKind::MIXED_Y || kind == ModelKind::TYPE_I ||
           kind == ModelKind::GENERAL;
  }
  bool has_y_brownian() const noexcept {
    return kind == ModelKind::WW1 || kind == ModelKind::MIXED_Y || kind == ModelKind::TYPE_I ||
           kind == ModelKind::TYPE_II;
  }
  /// Drift of Y at level y.
  double y_drift(double y) const noexcept {
    return kind == ModelKind::GENERAL ? drift1(y) : a - b * y;
  }
  /// Drift of X at (y, x).
  double x_drift(double y, double x) const noexcept {
    if (kind == ModelKind::GENERAL) return drift2(x);
    return kappa - lambda * x - (kind == ModelKind::TYPE_II ? gamma * y : 0.0);
  }
  /// Contraction rate of the X drift (lambda, or lambda2 for GENERAL).
  double x_rate() const noexcept { return kind == ModelKind::GENERAL ? lambda2 : lambda; }
};

struct State {
  double y = 0.0;
  double x = 0.0;
};

/// Flag attached to models outside the ergodicity hypothesis b > 0, lambda > 0.
inline constexpr const char* kNonErgodicFlag = "non-ergodic-hypothesis";

/// Checks every invariant of `spec` and returns it with inactive fields
/// normalized (beta zeroed where no Y-jump driver exists). Throws
/// ValidationError naming every offending field.
///
/// GENERAL drifts are checked on 257 equispaced points of their declared
/// range (clipped to y >= 0 for drift1): every pair must satisfy
/// b(u) - b(v) <= -lambda_i (u - v) + 1e-12 for u > v.
ModelSpec validate_model(const ModelSpec& spec);

/// Soft flags of a valid model; contains kNonErgodicFlag when the
/// ergodicity hypothesis fails. Such models may be simulated but not certified.
std::vector<std::string> model_flags(const ModelSpec& spec);

/// The fixed even C^2 function used in W(y, x) = 1 + y + h(x): |x| for
/// |x| >= 2 and 3/4 + 3x^2/8 - x^4/64 inside. sup|h'| = 1, sup|h''| = 3/4.
double h_value(double x) noexcept;
double h_first(double x) noexcept;
double h_second(double x) noexcept;
inline constexpr double kHFirstNorm = 1.0;
inline constexpr double kHSecondNorm = 0.75;

/// W(y, x) = 1 + y + h(x).
inline double moment_weight(double y, double x) noexcept { return 1.0 + y + h_value(x); }

/// Constant C0 with (L W) <= C0 W for W = 1 + y + h(x).
///
/// Assembled term by term: the constant part a + |kappa| |h'| + 2 |lambda| |h'|,
/// the y-coefficient |b| + |h''| M2(1) / 2 + 2 |h'| m1(1) (Levy moments of the
/// X-noise, plus Brownian and feedback terms where present) and the
/// h-coefficient |lambda| |h'|; C0 is the largest of the three.
double moment_bound_coeff(const ModelSpec& spec);

}  // namespace twofactor
