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

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>

namespace oracle {

// Double-exponential quadrature of f over (lo, inf). The library itself never
// uses these rules.
inline double tail(const std::function<double(double)>& f, double lo) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate([&](double u) { return f(lo + u); }, 1e-14);
}

// Integral of f over [lo, hi] in the variable t = log z. Levy integrands near
// 0 behave like a power of z, which is smooth in t; the caller picks lo so
// that the part below it is negligible or adds it in closed form.
inline double head(const std::function<double(double)>& f, double lo, double hi) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(
      [&](double t) {
        const double z = std::exp(t);
        return f(z) * z;
      },
      std::log(lo), std::log(hi), 1e-14);
}

}  // namespace oracle
