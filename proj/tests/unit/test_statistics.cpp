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
#include "twofactor/statistics.hpp"

using namespace twofactor;

TEST_SUITE("statistics") {
  TEST_CASE("empirical W1") {
    CHECK(empirical_w1_1d({0.0, 0.0}, {1.0, 3.0}) == doctest::Approx(2.0));
    std::mt19937_64 gen(1);
    std::normal_distribution<double> n;
    std::vector<double> a(500), b(500), c(500), shifted(500);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = n(gen);
      b[i] = 2.0 * n(gen);
      c[i] = n(gen) + 1.0;
      shifted[i] = a[i] + 0.7;
    }
    CHECK(empirical_w1_1d(a, shifted) == doctest::Approx(0.7));
    CHECK(empirical_w1_1d(a, a) == 0.0);
    CHECK(empirical_w1_1d(a, b) == doctest::Approx(empirical_w1_1d(b, a)));
    CHECK(empirical_w1_1d(a, c) <= empirical_w1_1d(a, b) + empirical_w1_1d(b, c) + 1e-12);
  }

  TEST_CASE("Kolmogorov distribution and KS test") {
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    const std::vector<double> a = {1, 2, 3, 4, 5};
    const KsResult same = ks_two_sample(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == doctest::Approx(1.0));
    std::vector<double> lo(200), hi(200);
    for (int i = 0; i < 200; ++i) {
      lo[i] = i;
      hi[i] = 1000 + i;
    }
    const KsResult apart = ks_two_sample(lo, hi);
    CHECK(apart.statistic == 1.0);
    CHECK(apart.p_value < 1e-10);
  }

  TEST_CASE("means and line fits") {
    const MeanEstimate m = mean_stderr({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    const MedianOfMeans mom = median_of_means({1, 1, 1, 1, 1, 1, 9, 9, 9}, 3);
    CHECK(mom.estimate == doctest::Approx(1.0));
    const LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.slope_stderr == doctest::Approx(0.0));
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  }

  TEST_CASE("Hill estimator on Pareto quantiles") {
    const std::size_t n = 100000;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow((i + 0.5) / n, -1.0 / 1.5);
    CHECK(hill_tail_index(v, 1000) == doctest::Approx(1.5).epsilon(0.01));
  }

  TEST_CASE("bootstrap over rows") {
    PathMatrix m{4, 2, {1, 5, 1, 6, 1, 7, 1, 8}};
    const BootstrapColumns a = bootstrap_columns(m, 200, 3);
    const BootstrapColumns b = bootstrap_columns(m, 200, 3);
    CHECK(a.mean[0] == 1.0);
    CHECK(a.std_error[0] == 0.0);
    CHECK(a.mean[1] == 6.5);
    CHECK(a.std_error[1] > 0.0);
    CHECK(a.ci_lo[1] <= 6.5);
    CHECK(a.ci_hi[1] >= 6.5);
    CHECK(a.std_error[1] == b.std_error[1]);
  }
}
