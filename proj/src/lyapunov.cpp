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

#include "twofactor/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twofactor/errors.hpp"

namespace twofactor {

namespace {

constexpr double kBridgeStart = 1.5;

double bridge_eval(const std::array<double, 6>& c, double tau, int order) {
  double out = 0.0;
  for (int k = 5; k >= order; --k) {
    double coef = c[k];
    for (int j = 0; j < order; ++j) coef *= (k - j);
    out = out * tau + coef;
  }
  return out;
}

}  // namespace

LyapunovShape::LyapunovShape(double theta, double delta, double kappa0)
    : theta_(theta), delta_(delta), kappa0_(kappa0) {
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0, 1)");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be > 0");
  if (!(kappa0 >= 2.0) || !std::isfinite(kappa0)) throw ParameterError("kappa0 must be >= 2");

  // Left end data from (r - 1)^{2+delta} at r = 3/2, right end (1, 0, 0).
  const double p = 2.0 + delta;
  const double v0 = std::pow(0.5, p);
  const double d0 = p * std::pow(0.5, p - 1.0);
  const double s0 = p * (p - 1.0) * std::pow(0.5, p - 2.0);
  const double w = kappa0 - kBridgeStart;

  // Quintic Hermite basis on u in [0, 1], coefficients of u^0..u^5.
  const double h0[6] = {1, 0, 0, -10, 15, -6};
  const double h1[6] = {0, 1, 0, -6, 8, -3};
  const double h2[6] = {0, 0, 0.5, -1.5, 1.5, -0.5};
  const double h3[6] = {0, 0, 0, 10, -15, 6};
  std::array<double, 6> u_coef{};
  for (int k = 0; k < 6; ++k) {
    u_coef[k] = v0 * h0[k] + w * d0 * h1[k] + w * w * s0 * h2[k] + h3[k];
  }
  double wk = 1.0;
  for (int k = 0; k < 6; ++k) {
    bridge_[k] = u_coef[k] / wk;
    wk *= w;
  }

  constexpr int kProbe = 4001;
  for (int i = 0; i < kProbe; ++i) {
    const double tau = w * i / (kProbe - 1);
    const double slope = bridge_eval(bridge_, tau, 1);
    const double val = bridge_eval(bridge_, tau, 0);
    if (slope < -1e-12 || val < -1e-12 || val > 1.0 + 1e-12) {
      throw ParameterError("g bridge on [3/2, " + std::to_string(kappa0) +
                           "] is not monotone in [0, 1] for delta = " + std::to_string(delta));
    }
  }
}

double feedback_kappa0(double gamma, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
  return 2.0 * (1.0 + std::abs(gamma) / lambda);
}

GValue g_eval(const LyapunovShape& shape, double r) {
  if (!(r >= 0.0)) throw DomainError("g_eval requires r >= 0");
  if (r <= 1.0) return {};
  if (r >= shape.kappa0()) return {1.0, 0.0, 0.0};
  if (r < kBridgeStart) {
    const double p = 2.0 + shape.delta();
    const double e = r - 1.0;
    return {std::pow(e, p), p * std::pow(e, p - 1.0), p * (p - 1.0) * std::pow(e, p - 2.0)};
  }
  const double tau = r - kBridgeStart;
  const auto& c = shape.bridge();
  return {bridge_eval(c, tau, 0), bridge_eval(c, tau, 1), bridge_eval(c, tau, 2)};
}

FValue F_eval(const LyapunovShape& shape, double s, double t) {
  if (!(s > 0.0)) throw DomainError("F_eval requires s > 0; use F(0, t) = t");
  if (!(t >= 0.0)) throw DomainError("F_eval requires t >= 0");
  FValue f;
  const double r = t / s;
  if (r <= 1.0) {
    f.value = s;
    f.d1 = 1.0;
    return f;
  }
  if (r >= shape.kappa0()) {
    f.value = t;
    f.d2 = 1.0;
    return f;
  }
  const GValue g = g_eval(shape, r);
  const double rm1 = r - 1.0;
  f.value = s + g.value * (t - s);
  f.d1 = 1.0 - g.value - g.d1 * r * rm1;
  f.d2 = g.value + g.d1 * rm1;
  f.d11 = (g.d2 * r * r * rm1 + 2.0 * r * r * g.d1) / s;
  f.d22 = (2.0 * g.d1 + g.d2 * rm1) / s;
  f.d12 = -(g.d2 * r * rm1 + 2.0 * r * g.d1) / s;
  return f;
}

double lemma_bounds_check(const LyapunovShape& shape,
                          const std::vector<std::pair<double, double>>& grid) {
  double c0 = 0.0;
  for (const auto& [s, t] : grid) {
    if (!(s > 0.0)) throw DomainError("lemma grid needs s > 0");
    const double r = t / s;
    if (r < 1.0 - 1e-12 || r > shape.kappa0() * (1.0 + 1e-12)) {
      throw DomainError("lemma grid point outside the band 1 <= t/s <= kappa0");
    }
    const FValue f = F_eval(shape, s, t);
    c0 = std::max({c0, std::abs(f.d1), std::abs(f.d2), s * std::abs(f.d11), s * std::abs(f.d22)});
  }
  return c0;
}

double lemma_bounds_check(const LyapunovShape& shape, int n) {
  if (n < 2) throw UsageError("lemma grid needs n >= 2");
  std::vector<std::pair<double, double>> grid;
  grid.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double s = std::pow(10.0, -3.0 + 6.0 * i / (n - 1));
    for (int j = 0; j < n; ++j) {
      const double r = 1.0 + (shape.kappa0() - 1.0) * j / (n - 1);
      grid.emplace_back(s, r * s);
    }
  }
  return lemma_bounds_check(shape, grid);
}

double U_eval(double theta, double s) noexcept { return s + std::pow(s, theta); }

VValue V_eval(const LyapunovShape& shape, double c, double s, double t) {
  if (!(c > 0.0)) throw DomainError("V_eval requires c > 0");
  if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("V_eval requires s, t >= 0");
  VValue v;
  if (s == 0.0) {
    v.value = t;
    v.d2 = 1.0;
    return v;
  }
  const double th = shape.theta();
  const FValue f = F_eval(shape, s, t);
  v.value = c * U_eval(th, s) + f.value;
  v.d1 = c * (1.0 + th * std::pow(s, th - 1.0)) + f.d1;
  v.d11 = c * th * (th - 1.0) * std::pow(s, th - 2.0) + f.d11;
  v.d2 = f.d2;
  v.d22 = f.d22;
  v.d12 = f.d12;
  return v;
}

double psi_theta(double theta, double u, double v) {
  if (!(u >= 0.0) || !(v >= 0.0)) throw DomainError("psi_theta requires u, v >= 0");
  return u + std::pow(u, theta) + v;
}

double equivalence_constant(const LyapunovShape& shape, double c) {
  if (!(c > 0.0)) throw DomainError("equivalence constant requires c > 0");
  return std::max({2.0 * c + 1.0, 1.0 / c, shape.kappa0()});
}

double psi_equivalence_constant(const LyapunovShape& shape, double c) {
  return 2.0 * equivalence_constant(shape, c);
}

}  // namespace twofactor
