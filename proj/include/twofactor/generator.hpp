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

#include <functional>
#include <vector>

#include "twofactor/model.hpp"
#include "twofactor/quadrature.hpp"

namespace twofactor {

/// A C^2 scalar field f(y, x) on R_+ x R with its partial derivatives.
/// Second derivatives may jump at the listed x or y positions; they are
/// used as quadrature split points.
struct ScalarField {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dy;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dyy;
  std::function<double(double, double)> dxx;
  std::function<double(double, double)> dxy;
  std::vector<double> x_kinks;
  std::vector<double> y_kinks;
};

/// The weight W(y, x) = 1 + y + h(x) as a ScalarField.
ScalarField moment_weight_field();

/// (L f)(y, x) for the uncoupled generator of `spec`.
///
/// Local part: Y drift * f_y + (y/2) f_yy (Brownian Y) + X drift * f_x, plus
/// (y/2) f_xx and rho y f_xy for the correlated X diffusion of TYPE_I. Jump
/// parts: y * integral of (f(y, x+z) - f - f_x z) nu_alpha(dz) and, for
/// kinds with a Y-jump driver, y * integral of (f(y+z, x) - f - f_y z)
/// nu_beta(dz). An index equal to 2 contributes (y/2) times the matching
/// second derivative instead.
///
/// Throws DomainError for y < 0 and NumericAccuracyError when a jump
/// integral misses its tolerance.
Estimate generator_apply(const ModelSpec& spec, const ScalarField& f, const State& point,
                         const QuadratureConfig& quad = {});

}  // namespace twofactor
