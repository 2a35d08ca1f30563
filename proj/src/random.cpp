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

#include "twofactor/random.hpp"

#include <cmath>

namespace twofactor {

double RandomStream::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, r2;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
  cached_normal_ = v * scale;
  has_cached_normal_ = true;
  return u * scale;
}

double RandomStream::exponential() noexcept {
  return -std::log1p(-uniform());
}

std::uint64_t RandomStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  // Inversion is exact and cheap for the small means that dominate thinning.
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    double prod = uniform_open();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= uniform_open();
      ++k;
    }
    return k;
  }
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

double RandomStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

}  // namespace twofactor
