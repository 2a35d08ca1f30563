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
#include <random>

#include "doctest.h"
#include "twofactor/errors.hpp"
#include "twofactor/lyapunov.hpp"

using namespace twofactor;

TEST_SUITE("lyapunov") {
  TEST_CASE("g reference values") {
    const LyapunovShape shape(0.3, 1.0, 2.0);
    const GValue a = g_eval(shape, 0.5);
    CHECK(a.value == 0.0);
    CHECK(a.d1 == 0.0);
    CHECK(a.d2 == 0.0);
    CHECK(g_eval(shape, 1.25).value == doctest::Approx(0.015625).epsilon(1e-15));
    const GValue c = g_eval(shape, 3.0);
    CHECK(c.value == 1.0);
    CHECK(c.d1 == 0.0);
    CHECK(c.d2 == 0.0);
  }

  TEST_CASE("g is C2 and monotone") {
    for (double k0 : {2.0, 2.5, 3.0}) {
      const LyapunovShape shape(0.3, 1.0, k0);
      for (double r : {1.0, 1.5, k0}) {
        const double e = 1e-7;
        const GValue lo = g_eval(shape, r - e), hi = g_eval(shape, r + e);
        CHECK(std::abs(lo.value - hi.value) < 1e-6);
        CHECK(std::abs(lo.d1 - hi.d1) < 1e-5);
        CHECK(std::abs(lo.d2 - hi.d2) < 1e-4);
      }
      double prev = 0.0;
      for (int i = 0; i <= 4000; ++i) {
        const double r = 1.0 + (k0 - 1.0) * i / 4000.0;
        const GValue g = g_eval(shape, r);
        CHECK(g.value >= prev - 1e-15);
        CHECK(g.value <= 1.0 + 1e-15);
        prev = g.value;
        const double e = 1e-6;
        CHECK(g.d1 == doctest::Approx((g_eval(shape, r + e).value - g_eval(shape, r - e).value) /
                                      (2 * e)).epsilon(1e-5).scale(1.0));
      }
    }
  }

  TEST_CASE("invalid shapes") {
    CHECK_THROWS_AS(LyapunovShape(0.0), ParameterError);
    CHECK_THROWS_AS(LyapunovShape(1.0), ParameterError);
    CHECK_THROWS_AS(LyapunovShape(0.5, -1.0), ParameterError);
    CHECK_THROWS_AS(LyapunovShape(0.5, 1.0, 1.5), ParameterError);
    // The quintic bridge overshoots once kappa0 is far from 3/2.
    CHECK_THROWS_AS(LyapunovShape(0.5, 1.0, 6.0), ParameterError);
    CHECK(feedback_kappa0(1.0, 1.0) == doctest::Approx(4.0));
  }

  TEST_CASE("F reference values and homogeneity") {
    const LyapunovShape shape(0.3, 1.0, 2.0);
    CHECK(F_eval(shape, 2.0, 1.0).value == 2.0);
    CHECK(F_eval(shape, 1.0, 3.0).value == 3.0);
    CHECK(F_eval(shape, 1.0, 1.25).value == doctest::Approx(1.00390625).epsilon(1e-15));
    const FValue pure = F_eval(shape, 2.0, 1.0);
    CHECK(pure.d1 == 1.0);
    CHECK(pure.d2 == 0.0);
    CHECK_THROWS_AS(F_eval(shape, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(F_eval(shape, 1.0, -1.0), DomainError);
    for (double r : {0.3, 1.1, 1.6, 1.9, 2.5}) {
      const FValue a = F_eval(shape, 1.0, r), b = F_eval(shape, 7.0, 7.0 * r);
      CHECK(b.value == doctest::Approx(7.0 * a.value).epsilon(1e-13));
      CHECK(b.d1 == doctest::Approx(a.d1).epsilon(1e-12));
      CHECK(7.0 * b.d11 == doctest::Approx(a.d11).epsilon(1e-11));
      // Euler relation for degree-one homogeneity.
      CHECK(a.d1 + r * a.d2 == doctest::Approx(a.value).epsilon(1e-13));
    }
  }

  TEST_CASE("F derivatives against finite differences") {
    const LyapunovShape shape(0.3, 1.0, 2.0);
    const double e = 1e-5;
    for (double t : {1.2, 1.35, 1.7, 1.85}) {
      const FValue f = F_eval(shape, 1.0, t);
      const auto val = [&](double s, double tt) { return F_eval(shape, s, tt).value; };
      CHECK(f.d1 == doctest::Approx((val(1 + e, t) - val(1 - e, t)) / (2 * e)).epsilon(1e-7));
      CHECK(f.d2 == doctest::Approx((val(1, t + e) - val(1, t - e)) / (2 * e)).epsilon(1e-7));
      CHECK(f.d22 == doctest::Approx((F_eval(shape, 1, t + e).d2 - F_eval(shape, 1, t - e).d2) /
                                     (2 * e)).epsilon(1e-5));
      CHECK(f.d12 == doctest::Approx((F_eval(shape, 1 + e, t).d2 - F_eval(shape, 1 - e, t).d2) /
                                     (2 * e)).epsilon(1e-5));
    }
  }

  TEST_CASE("lemma bounds are scale invariant") {
    const LyapunovShape shape(0.3, 1.0, 2.0);
    const double c0 = lemma_bounds_check(shape, 64);
    CHECK(std::isfinite(c0));
    CHECK(c0 >= 1.0);
    std::vector<std::pair<double, double>> a, b;
    for (int i = 0; i <= 50; ++i) {
      const double r = 1.0 + i / 50.0;
      a.push_back({1.0, r});
      b.push_back({1e3, 1e3 * r});
    }
    CHECK(lemma_bounds_check(shape, a) == doctest::Approx(lemma_bounds_check(shape, b)).epsilon(1e-10));
    CHECK_THROWS_AS(lemma_bounds_check(shape, {{1.0, 3.0}}), DomainError);
  }

  TEST_CASE("V, U and psi") {
    const LyapunovShape shape(0.5, 1.0, 2.0);
    const VValue z = V_eval(shape, 2.0, 0.0, 1.7);
    CHECK(z.value == 1.7);
    CHECK(z.d2 == 1.0);
    CHECK_FALSE(z.d1.has_value());
    CHECK(V_eval(shape, 2.0, 4.0, 1.0).value == doctest::Approx(16.0));
    CHECK(U_eval(0.5, 4.0) == doctest::Approx(6.0));
    CHECK(psi_theta(0.5, 0.0, 0.0) == 0.0);
    CHECK(psi_theta(0.5, 4.0, 3.0) == doctest::Approx(9.0));
    CHECK_THROWS_AS(psi_theta(0.5, -1.0, 0.0), DomainError);
  }

  TEST_CASE("equivalence constants hold on random points") {
    for (double c : {0.1, 2.0, 234.0}) {
      const LyapunovShape shape(0.3, 1.0, 2.0);
      const double k = equivalence_constant(shape, c);
      const double kp = psi_equivalence_constant(shape, c);
      std::mt19937_64 gen(3);
      std::uniform_real_distribution<double> lg(-6.0, 4.0);
      for (int i = 0; i < 2000; ++i) {
        const double s = std::pow(10.0, lg(gen)), t = std::pow(10.0, lg(gen));
        const double v = V_eval(shape, c, s, t).value;
        const double m = std::max(s, std::pow(s, 0.3)) + t;
        CHECK(v / k <= m * (1 + 1e-12));
        CHECK(m <= k * v * (1 + 1e-12));
        const double p = psi_theta(0.3, s, t);
        CHECK(p / kp <= v * (1 + 1e-12));
        CHECK(v <= kp * p * (1 + 1e-12));
      }
    }
  }
}
