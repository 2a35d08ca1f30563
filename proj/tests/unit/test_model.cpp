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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "twofactor/errors.hpp"
#include "twofactor/generator.hpp"
#include "twofactor/model.hpp"

using namespace twofactor;

namespace {

ModelSpec ww1(double a, double b, double kappa, double lambda) {
  ModelSpec m;
  m.kind = ModelKind::WW1;
  m.a = a;
  m.b = b;
  m.kappa = kappa;
  m.lambda = lambda;
  m.alpha = 1.5;
  return m;
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("validation accepts the reference model") {
    const ModelSpec m = validate_model(ww1(1, 2, 0, 1));
    CHECK(m.kind == ModelKind::WW1);
    CHECK(model_flags(m).empty());
  }

  TEST_CASE("b = 0 is simulable but flagged") {
    const ModelSpec m = validate_model(ww1(1, 0, 0, 1));
    CHECK(has(model_flags(m), kNonErgodicFlag));
  }

  TEST_CASE("every offending field is named") {
    ModelSpec m = ww1(-1, 1, 0, 1);
    m.alpha = 2.5;
    try {
      validate_model(m);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(has(e.fields(), "alpha"));
      CHECK(has(e.fields(), "a"));
    }
  }

  TEST_CASE("inactive beta is normalized") {
    ModelSpec m = ww1(1, 1, 0, 1);
    m.beta = 1.7;
    CHECK(validate_model(m).beta == 0.0);
  }

  TEST_CASE("kind names round trip") {
    for (ModelKind k : {ModelKind::WW1, ModelKind::WW2, ModelKind::MIXED_Y, ModelKind::TYPE_I,
                        ModelKind::TYPE_II, ModelKind::GENERAL}) {
      CHECK(model_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(model_kind_from_string("WW3"), ParameterError);
  }

  TEST_CASE("h is C2 at the junction and matches its stated norms") {
    for (double x : {2.0, -2.0}) {
      const double e = 1e-9;
      CHECK(h_value(x - e) == doctest::Approx(h_value(x + e)).epsilon(1e-8));
      CHECK(h_first(x - e) == doctest::Approx(h_first(x + e)).epsilon(1e-8));
      CHECK(std::abs(h_second(x - e) - h_second(x + e)) < 1e-7);
    }
    double sup1 = 0.0, sup2 = 0.0;
    for (int i = -4000; i <= 4000; ++i) {
      const double x = i * 1e-3;
      sup1 = std::max(sup1, std::abs(h_first(x)));
      sup2 = std::max(sup2, std::abs(h_second(x)));
      // Finite-difference oracle for the derivatives.
      const double e = 1e-5;
      CHECK(h_first(x) == doctest::Approx((h_value(x + e) - h_value(x - e)) / (2 * e)).epsilon(1e-6));
    }
    CHECK(sup1 == doctest::Approx(kHFirstNorm));
    CHECK(sup2 == doctest::Approx(kHSecondNorm));
    CHECK(h_value(0.5) == h_value(-0.5));
  }

  TEST_CASE("C0 dominates LW / W on random points") {
    const ModelSpec m = validate_model(ww1(1, 1, 0, 1));
    const double c0 = moment_bound_coeff(m);
    CHECK(std::isfinite(c0));
    CHECK(c0 > 0.0);
    const ScalarField w = moment_weight_field();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ys(0.0, 20.0), xs(-20.0, 20.0);
    double worst = -INFINITY;
    for (int i = 0; i < 1000; ++i) {
      const State p{ys(gen), xs(gen)};
      const Estimate lw = generator_apply(m, w, p);
      worst = std::max(worst, (lw.value + lw.error) / moment_weight(p.y, p.x));
    }
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const State p{i * 1.5, -6.0 + j * 1.3};
        const Estimate lw = generator_apply(m, w, p);
        worst = std::max(worst, (lw.value + lw.error) / moment_weight(p.y, p.x));
      }
    }
    CHECK(worst <= c0);
  }

  TEST_CASE("C0 stays positive without a level and grows with |kappa|") {
    CHECK(moment_bound_coeff(validate_model(ww1(0, 1, 0, 1))) > 0.0);
    double prev = 0.0;
    for (double k : {0.0, 1.0, 5.0, 50.0}) {
      const double c0 = moment_bound_coeff(validate_model(ww1(1, 1, -k, 1)));
      CHECK(c0 >= prev);
      prev = c0;
    }
  }
}
