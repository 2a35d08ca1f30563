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

#include "twofactor/random.hpp"

namespace twofactor {

/// Spectrally positive alpha-stable law, 1 < alpha < 2.
///
/// Normalization: Levy measure nu(dz) = C z^{-1-alpha} dz on z > 0 with
/// C = 1 / (alpha * Gamma(-alpha)), compensated to mean zero. The Laplace
/// transform is then E[exp(-u Z_t)] = exp(t u^alpha / alpha) for u >= 0, and
/// Z_t has the law of t^{1/alpha} Z_1.
///
/// In the (scale, skewness, shift) parameterization used by the
/// Chambers-Mallows-Stuck sampler this is S_alpha(sigma, 1, 0) with
/// sigma = (|cos(pi alpha / 2)| / alpha)^{1/alpha}.
class StableLaw {
 public:
  /// Throws ParameterError unless 1 < alpha < 2.
  explicit StableLaw(double alpha);

  double alpha() const noexcept { return alpha_; }
  /// Levy measure constant 1 / (alpha * Gamma(-alpha)).
  double c_alpha() const noexcept { return c_alpha_; }
  /// CMS scale sigma of the unit-time increment.
  double cms_scale() const noexcept { return cms_scale_; }

  /// Laplace exponent u^alpha / alpha, u >= 0.
  double laplace_exponent(double u) const;

  /// Levy density C z^{-1-alpha} for z > 0 (0 otherwise).
  double density(double z) const noexcept;

 private:
  double alpha_;
  double c_alpha_;
  double cms_scale_;
  // Precomputed CMS constants for skewness 1.
  double cms_b_;
  double cms_s_;

  friend double sample_stable_increment(const StableLaw&, double, RandomStream&);
};

/// One increment Z_dt of the compensated spectrally positive stable process.
/// Exact in law (Chambers-Mallows-Stuck); consumes one uniform and one
/// exponential. Throws DomainError for dt <= 0.
double sample_stable_increment(const StableLaw& law, double dt, RandomStream& rng);

/// Increment of the noise with index alpha in (1, 2]: alpha == 2 is a standard
/// Brownian increment, otherwise sample_stable_increment.
double sample_noise_increment(double alpha, double dt, RandomStream& rng);

/// nu((z0, inf)) = C z0^{-alpha} / alpha. Throws DomainError for z0 <= 0.
double levy_tail_mass(const StableLaw& law, double z0);

/// Integral of z nu(dz) over (z0, inf) = C z0^{1-alpha} / (alpha - 1).
double levy_tail_first_moment(const StableLaw& law, double z0);

/// Integral of z^2 nu(dz) over (0, eps) = C eps^{2-alpha} / (2 - alpha).
double levy_small_jump_variance(const StableLaw& law, double eps);

/// Integral of z nu(dz) over (0, eps) would diverge; this is the finite
/// integral of z^3 nu(dz) over (0, eps) used in Taylor remainder bounds.
double levy_small_jump_third_moment(const StableLaw& law, double eps);

}  // namespace twofactor
