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

#include "doctest.h"
#include "twofactor/ergodicity.hpp"
#include "twofactor/errors.hpp"

using namespace twofactor;

namespace {

ModelSpec ww1(double a = 1.0) {
  ModelSpec m;
  m.kind = ModelKind::WW1;
  m.a = a;
  m.b = m.lambda = 1.0;
  m.alpha = 1.5;
  return validate_model(m);
}

CoupledConfig config(double t_end, std::int64_t every) {
  CoupledConfig cfg;
  cfg.path.t_end = t_end;
  cfg.path.dt = 1e-3;
  cfg.path.seed = 11;
  cfg.record_every = every;
  return cfg;
}

}  // namespace

TEST_SUITE("ergodicity") {
  TEST_CASE("equal starts give a degenerate decay report") {
    const CoupledEnsemble e = simulate_coupled_ensemble(ww1(), {1.0, 1.0}, {1.0, 1.0}, config(1.0, 100),
                                                        default_coupling(ww1()), 50);
    DecayOptions opt;
    opt.min_paths = 50;
    opt.resamples = 50;
    const DecayReport r = decay_estimate(e, LyapunovShape(0.3), 2.0, opt);
    CHECK(r.degenerate);
    CHECK_FALSE(r.degenerate_reason.empty());
    for (double v : r.mean_V) CHECK(v == 0.0);
  }

  TEST_CASE("decay on a small ensemble") {
    const CoupledEnsemble e = simulate_coupled_ensemble(ww1(), {2.0, 1.0}, {1.0, 0.0}, config(3.0, 100),
                                                        default_coupling(ww1()), 500);
    DecayOptions opt;
    opt.min_paths = 500;
    opt.resamples = 200;
    opt.zeta = 0.6;
    const DecayReport r = decay_estimate(e, LyapunovShape(0.3), 200.0, opt);
    CHECK_FALSE(r.degenerate);
    CHECK(r.times.size() == 31);
    CHECK(r.mean_V.front() == doctest::Approx(r.bound.front()));
    CHECK(r.eta_hat > 0.0);
    CHECK(r.equivalence_holds);
    CHECK(r.mean_psi.back() < r.mean_psi.front());
    WassersteinOptions wo;
    wo.theta = 0.3;
    wo.resamples = 100;
    const WassersteinReport w = wasserstein_from_ensemble(e, wo);
    CHECK(w.coupling_bound.front() > 0.0);
    CHECK(w.coupling_bound.back() < w.coupling_bound.front());
    CHECK(w.dominates);
  }

  TEST_CASE("moments: start time and the absorbing model") {
    PathConfig cfg;
    cfg.dt = 0.01;
    cfg.seed = 3;
    const MomentReport r0 = moment_growth_check(ww1(), {2.0, 1.0}, {0.0, 0.5}, cfg, 2000);
    CHECK(r0.mean_W.front() == doctest::Approx(moment_weight(2.0, 1.0)));
    CHECK(r0.pass);
    // a = 0 and y = 0: Y stays at 0 and X relaxes deterministically.
    const MomentReport r1 = moment_growth_check(ww1(0.0), {0.0, 3.0}, {1.0}, cfg, 100);
    const double x1 = 3.0 * std::exp(-1.0);
    CHECK(r1.mean_W[0] == doctest::Approx(moment_weight(0.0, x1)).epsilon(1e-12));
    CHECK(r1.W_stderr[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r1.pass);
    CHECK_THROWS(moment_growth_check(ww1(), {1.0, 0.0}, {0.015}, cfg, 10));
  }

  TEST_CASE("marginal check on a small sample") {
    CoupledConfig cfg = config(1.0, 100);
    const MarginalReport r = marginal_check(ww1(), {2.0, 1.0}, {1.0, 0.0}, cfg, default_coupling(ww1()),
                                            2000, YScheme::EXACT_CIR, 2);
    CHECK(r.ks_pass);
    CHECK(r.mean_pass);
  }
}
