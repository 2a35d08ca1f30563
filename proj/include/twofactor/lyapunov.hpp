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

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace twofactor {

/// Shape of the switching function g and of the derived F, V.
///
/// g(r) = 0 on [0, 1], (r - 1)^{2+delta} on (1, 3/2), a quintic Hermite bridge
/// on [3/2, kappa0] and 1 on [kappa0, inf). The bridge matches value, slope
/// and curvature at both ends, so g is C^2.
class LyapunovShape {
 public:
  /// Throws ParameterError unless 0 < theta < 1, delta > 0, kappa0 >= 2 and
  /// the resulting bridge is nondecreasing with values in [0, 1].
  explicit LyapunovShape(double theta, double delta = 1.0, double kappa0 = 2.0);

  double theta() const noexcept { return theta_; }
  double delta() const noexcept { return delta_; }
  double kappa0() const noexcept { return kappa0_; }
  /// Bridge coefficients in powers of (r - 3/2), constant term first.
  const std::array<double, 6>& bridge() const noexcept { return bridge_; }

 private:
  double theta_;
  double delta_;
  double kappa0_;
  std::array<double, 6> bridge_{};
};

/// kappa0 = 2 (1 + |gamma| / lambda) for the Y-to-X feedback model.
double feedback_kappa0(double gamma, double lambda);

struct GValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

GValue g_eval(const LyapunovShape& shape, double r);

/// F and its partial derivatives at (s, t).
struct FValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
};

/// F(s, t) = (1 - g(t/s)) s + g(t/s) t. F = s for t <= s, F = t for
/// t >= kappa0 s, and F is positively homogeneous of degree one.
/// Throws DomainError for s <= 0 or t < 0.
FValue F_eval(const LyapunovShape& shape, double s, double t);

/// Largest of |d1 F|, |d2 F|, s |d11 F|, s |d22 F| over the given (s, t)
/// pairs. Every pair must satisfy 1 <= t/s <= kappa0 (DomainError otherwise).
double lemma_bounds_check(const LyapunovShape& shape,
                          const std::vector<std::pair<double, double>>& grid);

/// The same on an n x n grid: s log-spaced over [1e-3, 1e3], t/s spaced
/// evenly over [1, kappa0].
double lemma_bounds_check(const LyapunovShape& shape, int n = 64);

/// V(s, t) = c (s + s^theta) + F(s, t) with derivatives.
///
/// At s = 0, V(0, t) = t and d2 V = 1; the s-derivatives are unbounded there
/// and reported as empty.
struct VValue {
  double value = 0.0;
  double d2 = 0.0;
  double d22 = 0.0;
  std::optional<double> d1;
  std::optional<double> d11;
  std::optional<double> d12;
};

VValue V_eval(const LyapunovShape& shape, double c, double s, double t);

/// U(s) = s + s^theta, the s-only part of V per unit weight c.
double U_eval(double theta, double s) noexcept;

/// psi_theta(u, v) = u + u^theta + v. Throws DomainError for negative input.
double psi_theta(double theta, double u, double v);

/// K with V / K <= (max(s, s^theta) + t) <= K V:
/// K = max(2c + 1, 1/c, kappa0).
double equivalence_constant(const LyapunovShape& shape, double c);

/// Constant K' with psi / K' <= V <= K' psi; psi lies within a factor two of
/// max(s, s^theta) + t, so K' = 2 K.
double psi_equivalence_constant(const LyapunovShape& shape, double c);

}  // namespace twofactor
