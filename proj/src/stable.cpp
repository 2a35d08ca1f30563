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

#include "twofactor/stable.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twofactor/errors.hpp"

namespace twofactor {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw DomainError(std::string(name) + " must be > 0, got " + std::to_string(v));
  }
}

}  // namespace

StableLaw::StableLaw(double alpha) : alpha_(alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw ParameterError("stable index alpha must lie in (1, 2), got " + std::to_string(alpha));
  }
  c_alpha_ = 1.0 / (alpha * std::tgamma(-alpha));
  const double half_pi_alpha = 0.5 * std::numbers::pi * alpha;
  cms_scale_ = std::pow(std::abs(std::cos(half_pi_alpha)) / alpha, 1.0 / alpha);
  const double tan_term = std::tan(half_pi_alpha);
  cms_b_ = std::atan(tan_term) / alpha;
  cms_s_ = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
}

double StableLaw::laplace_exponent(double u) const {
  if (u < 0.0) throw DomainError("Laplace exponent requires u >= 0");
  return std::pow(u, alpha_) / alpha_;
}

double StableLaw::density(double z) const noexcept {
  return z > 0.0 ? c_alpha_ * std::pow(z, -1.0 - alpha_) : 0.0;
}

double sample_stable_increment(const StableLaw& law, double dt, RandomStream& rng) {
  require_positive(dt, "dt");
  const double a = law.alpha_;
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  const double shifted = a * (v + law.cms_b_);
  const double x = law.cms_s_ * std::sin(shifted) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - shifted) / w, (1.0 - a) / a);
  return law.cms_scale_ * std::pow(dt, 1.0 / a) * x;
}

double sample_noise_increment(double alpha, double dt, RandomStream& rng) {
  if (alpha == 2.0) {
    require_positive(dt, "dt");
    return std::sqrt(dt) * rng.normal();
  }
  // Construction is cheap; callers on hot paths hold a StableLaw instead.
  return sample_stable_increment(StableLaw(alpha), dt, rng);
}

double levy_tail_mass(const StableLaw& law, double z0) {
  require_positive(z0, "z0");
  return law.c_alpha() * std::pow(z0, -law.alpha()) / law.alpha();
}

double levy_tail_first_moment(const StableLaw& law, double z0) {
  require_positive(z0, "z0");
  return law.c_alpha() * std::pow(z0, 1.0 - law.alpha()) / (law.alpha() - 1.0);
}

double levy_small_jump_variance(const StableLaw& law, double eps) {
  require_positive(eps, "eps");
  return law.c_alpha() * std::pow(eps, 2.0 - law.alpha()) / (2.0 - law.alpha());
}

double levy_small_jump_third_moment(const StableLaw& law, double eps) {
  require_positive(eps, "eps");
  return law.c_alpha() * std::pow(eps, 3.0 - law.alpha()) / (3.0 - law.alpha());
}

}  // namespace twofactor
