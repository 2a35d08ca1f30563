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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "twofactor/errors.hpp"
#include "twofactor/quadrature.hpp"

using namespace twofactor;

namespace {

// The increments tested here are exactly 0 or z^2 near 0, so the part below
// 1e-60 is below 1e-60^{0.3} relative.
double levy_oracle(const StableLaw& law, const std::function<double(double)>& phi,
                   double split) {
  const auto g = [&](double z) { return phi(z) * law.density(z); };
  return oracle::head(g, 1e-60, split) + oracle::tail(g, split);
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("interval integrals") {
    const QuadratureConfig q;
    double l1 = 0.0;
    const Estimate a = integrate_interval([](double x) { return x * x; }, 0.0, 1.0, q, &l1);
    CHECK(a.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(l1 == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    const Estimate b = integrate_interval([](double x) { return 1.0 / x; }, 1.0, 1e6, q);
    CHECK(b.value == doctest::Approx(std::log(1e6)).epsilon(1e-11));
    const Estimate c =
        integrate_interval([](double x) { return std::sin(x); }, 0.0, 2.0 * std::numbers::pi, q, &l1);
    CHECK(std::abs(c.value) < 1e-12);
    // The L1 mass is a by-product of the same nodes. Here a single panel
    // already meets the tolerance, so |sin| is only resolved to a few percent.
    CHECK(l1 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(c.error <= 1e-10 * 4.0 + 1e-14);
    CHECK_THROWS_AS(integrate_interval([](double) { return 1.0; }, 1.0, 0.0, q), DomainError);
  }

  TEST_CASE("double tail K(u)") {
    const StableLaw law(1.5);
    for (double u : {1e-3, 0.5, 3.0}) {
      const double ref = oracle::tail([&](double z) { return (z - u) * law.density(z); }, u);
      CHECK(levy_double_tail(law, u) == doctest::Approx(ref).epsilon(1e-9));
    }
  }

  TEST_CASE("smooth increment: Laplace exponent") {
    for (double alpha : {1.2, 1.5, 1.9}) {
      const StableLaw law(alpha);
      JumpIncrement inc;
      inc.phi = [](double z) { return std::expm1(-z) + z; };
      inc.dphi = [](double z) { return 1.0 - std::exp(-z); };
      inc.d2phi = [](double z) { return std::exp(-z); };
      const Estimate e = levy_jump_integral(law, inc, {});
      CHECK(e.value == doctest::Approx(1.0 / alpha).epsilon(1e-9));
      CHECK(e.error <= 1e-9);
    }
  }

  TEST_CASE("kinked increment with affine tail") {
    const StableLaw law(1.5);
    const double d = 0.37;
    JumpIncrement inc;
    inc.phi = [d](double z) { return z > d ? 2.0 * (z - d) : 0.0; };
    inc.dphi = [d](double z) { return z > d ? 2.0 : 0.0; };
    inc.d2phi = [](double) { return 0.0; };
    inc.breakpoints = {d};
    inc.slope_jumps = {2.0};
    inc.affine_beyond_last = true;
    const Estimate e = levy_jump_integral(law, inc, {});
    CHECK(e.value == doctest::Approx(2.0 * levy_double_tail(law, d)).epsilon(1e-12));
    CHECK(e.value == doctest::Approx(levy_oracle(law, inc.phi, d)).epsilon(1e-9));
  }

  TEST_CASE("curvature jump with affine tail") {
    const StableLaw law(1.7);
    JumpIncrement inc;
    inc.phi = [](double z) { return z < 1.0 ? z * z : 2.0 * z - 1.0; };
    inc.dphi = [](double z) { return z < 1.0 ? 2.0 * z : 2.0; };
    inc.d2phi = [](double z) { return z < 1.0 ? 2.0 : 0.0; };
    inc.breakpoints = {1.0};
    inc.slope_jumps = {0.0};
    inc.affine_beyond_last = true;
    const Estimate e = levy_jump_integral(law, inc, {});
    CHECK(e.value == doctest::Approx(levy_oracle(law, inc.phi, 1.0)).epsilon(1e-9));

    const Estimate lo = levy_jump_integral_on(law, inc, 0.0, 1.0, {});
    const Estimate hi = levy_jump_integral_on(law, inc, 1.0, INFINITY, {});
    CHECK(lo.value + hi.value == doctest::Approx(e.value).epsilon(1e-9));
    const double ref_lo =
        oracle::head([&](double z) { return inc.phi(z) * law.density(z); }, 1e-60, 1.0);
    CHECK(lo.value == doctest::Approx(ref_lo).epsilon(1e-9));
  }

  TEST_CASE("unreachable tolerance raises") {
    const StableLaw law(1.5);
    JumpIncrement inc;
    inc.phi = [](double z) { return std::sin(50.0 * z) * z * z; };
    inc.dphi = [](double z) { return 50.0 * std::cos(50.0 * z) * z * z + 2.0 * z * std::sin(50.0 * z); };
    inc.d2phi = [](double z) {
      return -2500.0 * std::sin(50.0 * z) * z * z + 200.0 * z * std::cos(50.0 * z) +
             2.0 * std::sin(50.0 * z);
    };
    QuadratureConfig q;
    q.rel_tol = 1e-15;
    q.abs_tol = 1e-300;
    q.max_depth = 1;
    CHECK_THROWS_AS(levy_jump_integral(law, inc, q), NumericAccuracyError);
  }

  TEST_CASE("tightened config") {
    const QuadratureConfig q;
    const QuadratureConfig t = q.tightened(10.0);
    CHECK(t.rel_tol == doctest::Approx(q.rel_tol / 10.0));
    CHECK(t.abs_tol == doctest::Approx(q.abs_tol / 10.0));
    CHECK(t.max_depth > q.max_depth);
  }
}
