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

#include <cmath>
#include <functional>
#include <vector>

#include "twofactor/stable.hpp"

namespace twofactor {

struct QuadratureConfig {
  /// Requested relative accuracy of each assembled integral.
  double rel_tol = 1e-10;
  /// Absolute floor for integrals that vanish.
  double abs_tol = 1e-14;
  /// Maximum bisection depth of any panel.
  unsigned max_depth = 18;

  QuadratureConfig tightened(double factor) const {
    QuadratureConfig q = *this;
    q.rel_tol /= factor;
    q.abs_tol /= factor;
    q.max_depth += 4;
    return q;
  }
};

/// A value with an error bound. Sums add both.
struct Estimate {
  double value = 0.0;
  double error = 0.0;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
  friend Estimate operator+(Estimate a, const Estimate& b) { return a += b; }
  friend Estimate operator*(double k, Estimate e) {
    e.value *= k;
    e.error *= std::abs(k);
    return e;
  }
};

/// Globally adaptive G7/K15 on [a, b]: the panel with the largest error is
/// bisected until the summed error is at most rel_tol times the integral of
/// |f| (or abs_tol). Switches to a logarithmic variable when 0 < a and b / a
/// is large. `l1` receives the integral of |f| if non-null. The returned
/// error may exceed the request; callers decide whether that is fatal.
Estimate integrate_interval(const std::function<double(double)>& f, double a, double b,
                            const QuadratureConfig& cfg, double* l1 = nullptr);

/// K(u) = integral over (u, inf) of (z - u) nu(dz) = C u^{1-alpha} / (alpha (alpha - 1)).
double levy_double_tail(const StableLaw& law, double u);

/// The increment phi(z) = f(p + z) - f(p) - f'(p) z of a function along a
/// jump direction, described through its derivatives in z.
///
/// phi must be continuous with phi(0) = phi'(0) = 0. phi'' may be
/// discontinuous at `breakpoints`; phi' may jump there by `slope_jumps[i]`
/// (right limit minus left limit). With `affine_beyond_last` set, phi'' == 0
/// past the last breakpoint and the tail is exact; otherwise the tail is
/// integrated directly from `phi` under a change of variables that maps the
/// heavy tail onto (0, 1].
///
/// With a nonzero `center` c, the callbacks, breakpoints and the range of
/// levy_jump_integral_on all take the offset w = z - c instead of z. This keeps
/// the distance to a breakpoint near c exact when c is much larger than the
/// spacing of the breakpoints. A nonzero center requires `affine_beyond_last`.
struct JumpIncrement {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> d2phi;
  std::vector<double> breakpoints;
  std::vector<double> slope_jumps;
  bool affine_beyond_last = false;
  /// Characteristic length used when no breakpoint is available.
  double scale = 1.0;
  double center = 0.0;
};

/// Integral of phi(z) nu(dz) over z > 0, assembled from
/// integral of phi''(u) K(u) du plus point masses slope_jump * K(b).
/// Throws NumericAccuracyError if the accumulated error exceeds the request.
Estimate levy_jump_integral(const StableLaw& law, const JumpIncrement& inc,
                            const QuadratureConfig& cfg);

/// Same integral restricted to z in [lo, hi] (hi may be +inf; both in offset
/// coordinates when the increment has a center), in direct form
/// through integration by parts. Used to attribute the jump integral to
/// regions of the post-jump state. Breakpoints inside (lo, hi) are honoured.
Estimate levy_jump_integral_on(const StableLaw& law, const JumpIncrement& inc, double lo,
                               double hi, const QuadratureConfig& cfg);

}  // namespace twofactor
