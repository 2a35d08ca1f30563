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
#include <sstream>

#include "doctest.h"
#include "twofactor/errors.hpp"
#include "twofactor/path.hpp"
#include "twofactor/statistics.hpp"

using namespace twofactor;

namespace {

ModelSpec ww1() {
  ModelSpec m;
  m.kind = ModelKind::WW1;
  m.a = m.b = m.lambda = 1.0;
  m.alpha = 1.5;
  return validate_model(m);
}

}  // namespace

TEST_SUITE("path") {
  TEST_CASE("exact CIR step has the ODE mean") {
    RandomStream rng(5);
    std::vector<double> v(1000000);
    for (double& y : v) y = cir_exact_step(3.0, 1.0, 2.0, 0.5, rng);
    const MeanEstimate m = mean_stderr(v);
    CHECK(std::abs(m.mean - (0.5 + 2.5 * std::exp(-1.0))) <= 4.0 * m.std_error);
  }

  TEST_CASE("zero is absorbing without a level and left at once with one") {
    RandomStream rng(6);
    for (int i = 0; i < 1000; ++i) CHECK(cir_exact_step(0.0, 0.0, 1.0, 0.01, rng) == 0.0);
    CHECK(stable_cir_step(0.0, 0.0, 1.0, 1.5, 0.01, rng) == 0.0);
    std::int64_t tiny = 0;
    for (int i = 0; i < 100000; ++i) {
      const double y = cir_exact_step(0.0, 1.0, 1.0, 0.01, rng);
      CHECK(y > 0.0);
      tiny += y < 1e-6;
    }
    // P(Y_dt < 1e-6) is below 1e-7 for the Gamma(2) transition from 0.
    CHECK(tiny == 0);
  }

  TEST_CASE("stable CIR step keeps the ODE mean") {
    RandomStream rng(8);
    std::vector<double> v(20000);
    std::int64_t trunc = 0, steps = 0;
    for (double& y : v) {
      y = 0.0;
      for (int k = 0; k < 1000; ++k) {
        bool t = false;
        y = stable_cir_step(y, 1.0, 1.0, 1.5, 1e-3, rng, &t);
        trunc += t;
        ++steps;
        REQUIRE(y >= 0.0);
      }
    }
    const MedianOfMeans mom = median_of_means(v, 20);
    CHECK(std::abs(mom.estimate - (1.0 - std::exp(-1.0))) <= 4.0 * mom.error);
    CHECK(static_cast<double>(trunc) / steps < 0.02);
  }

  TEST_CASE("X step means and the noiseless limit") {
    RandomStream rng(9);
    const DriftFactors f = drift_factors(1.0, 0.01);
    CHECK(f.decay == doctest::Approx(std::exp(-0.01)));
    CHECK(stable_ou_step(5.0, 0.0, 0.3, 1.0, 0.0, 1.5, 0.01, rng) ==
          doctest::Approx(5.0 * std::exp(-0.01) + 0.3 * (1.0 - std::exp(-0.01))).epsilon(1e-14));
    std::vector<double> ou(20000), fb(20000);
    for (std::size_t i = 0; i < ou.size(); ++i) {
      double x = 5.0, z = 0.0;
      for (int k = 0; k < 100; ++k) {
        x = stable_ou_step(x, 1.0, 0.0, 1.0, 0.0, 1.5, 0.01, rng);
        z = stable_ou_step(z, 2.0, 0.0, 1.0, 1.0, 1.5, 0.01, rng);
      }
      ou[i] = x;
      fb[i] = z;
    }
    const MedianOfMeans a = median_of_means(ou, 20), b = median_of_means(fb, 20);
    CHECK(std::abs(a.estimate - 5.0 * std::exp(-1.0)) <= 4.0 * a.error);
    CHECK(std::abs(b.estimate + 2.0 * (1.0 - std::exp(-1.0))) <= 4.0 * b.error);
  }

  TEST_CASE("empty horizon returns the initial state") {
    PathConfig cfg;
    cfg.t_end = 0.0;
    const PathGrid g = simulate_path(ww1(), {2.0, -1.0}, cfg);
    REQUIRE(g.times.size() == 1);
    CHECK(g.states[0].y == 2.0);
    CHECK(g.states[0].x == -1.0);
  }

  TEST_CASE("paths are deterministic and nonnegative in y") {
    PathConfig cfg;
    cfg.t_end = 2.0;
    cfg.seed = 42;
    for (YScheme scheme : {YScheme::EXACT_CIR, YScheme::EULER}) {
      cfg.scheme = scheme;
      const PathGrid a = simulate_path(ww1(), {0.5, 1.0}, cfg);
      const PathGrid b = simulate_path(ww1(), {0.5, 1.0}, cfg);
      REQUIRE(a.states.size() == 2001);
      std::ostringstream sa, sb;
      write_path_csv(sa, a);
      write_path_csv(sb, b);
      CHECK(sa.str() == sb.str());
      CHECK(sa.str().rfind("t,y,x\n", 0) == 0);
      for (const State& s : a.states) CHECK(s.y >= 0.0);
    }
  }

  TEST_CASE("every kind simulates") {
    PathConfig cfg;
    cfg.t_end = 0.5;
    for (ModelKind k : {ModelKind::WW2, ModelKind::MIXED_Y, ModelKind::TYPE_I, ModelKind::TYPE_II,
                        ModelKind::GENERAL}) {
      ModelSpec m = ww1();
      m.kind = k;
      m.beta = 1.7;
      if (k == ModelKind::TYPE_I) m.rho = 0.5;
      if (k == ModelKind::TYPE_II) m.gamma = 0.5;
      m.drift1 = {1.0, 1.0, 0.0, 0.0, 10.0};
      m.drift2 = {0.0, 1.0, 0.1, -10.0, 10.0};
      m.lambda1 = m.lambda2 = 1.0;
      const PathGrid g = simulate_path(validate_model(m), {1.0, 0.0}, cfg);
      CHECK(g.states.size() == 501);
      for (const State& s : g.states) {
        CHECK(s.y >= 0.0);
        CHECK(std::isfinite(s.x));
      }
    }
  }

  TEST_CASE("bad step sizes") {
    PathConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS(simulate_path(ww1(), {1.0, 0.0}, cfg));
    CHECK(y_scheme_from_string(to_string(YScheme::EULER)) == YScheme::EULER);
    CHECK_THROWS_AS(y_scheme_from_string("MILSTEIN"), ParameterError);
  }
}
