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

#include "twofactor/generator.hpp"

#include <cmath>

#include "twofactor/errors.hpp"
#include "twofactor/stable.hpp"

namespace twofactor {

namespace {

std::vector<double> shifted_kinks(const std::vector<double>& kinks, double origin) {
  std::vector<double> out;
  for (double k : kinks) {
    if (k > origin) out.push_back(k - origin);
  }
  return out;
}

}  // namespace

ScalarField moment_weight_field() {
  ScalarField w;
  w.value = [](double y, double x) { return moment_weight(y, x); };
  w.dy = [](double, double) { return 1.0; };
  w.dx = [](double, double x) { return h_first(x); };
  w.dyy = [](double, double) { return 0.0; };
  w.dxx = [](double, double x) { return h_second(x); };
  w.dxy = [](double, double) { return 0.0; };
  w.x_kinks = {-2.0, 2.0};
  return w;
}

Estimate generator_apply(const ModelSpec& spec, const ScalarField& f, const State& point,
                         const QuadratureConfig& quad) {
  const double y = point.y;
  const double x = point.x;
  if (!(y >= 0.0)) throw DomainError("generator_apply requires y >= 0");

  Estimate out;
  out.value = spec.y_drift(y) * f.dy(y, x) + spec.x_drift(y, x) * f.dx(y, x);
  if (spec.has_y_brownian()) out.value += 0.5 * y * f.dyy(y, x);
  if (spec.kind == ModelKind::TYPE_I) {
    out.value += 0.5 * y * f.dxx(y, x) + spec.rho * y * f.dxy(y, x);
  }
  if (y == 0.0) return out;

  if (spec.alpha == 2.0) {
    out.value += 0.5 * y * f.dxx(y, x);
  } else {
    const StableLaw law(spec.alpha);
    const double f0 = f.value(y, x);
    const double fx = f.dx(y, x);
    JumpIncrement inc;
    inc.phi = [&](double z) { return f.value(y, x + z) - f0 - fx * z; };
    inc.dphi = [&](double z) { return f.dx(y, x + z) - fx; };
    inc.d2phi = [&](double z) { return f.dxx(y, x + z); };
    inc.breakpoints = shifted_kinks(f.x_kinks, x);
    inc.scale = 1.0 + std::abs(x);
    out += y * levy_jump_integral(law, inc, quad);
  }

  if (spec.has_y_jumps()) {
    if (spec.beta == 2.0) {
      out.value += 0.5 * y * f.dyy(y, x);
    } else {
      const StableLaw law(spec.beta);
      const double f0 = f.value(y, x);
      const double fy = f.dy(y, x);
      JumpIncrement inc;
      inc.phi = [&](double z) { return f.value(y + z, x) - f0 - fy * z; };
      inc.dphi = [&](double z) { return f.dy(y + z, x) - fy; };
      inc.d2phi = [&](double z) { return f.dyy(y + z, x); };
      inc.breakpoints = shifted_kinks(f.y_kinks, y);
      inc.scale = 1.0 + y;
      out += y * levy_jump_integral(law, inc, quad);
    }
  }
  return out;
}

}  // namespace twofactor
