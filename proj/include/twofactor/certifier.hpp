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

#include <cstdint>
#include <string>
#include <vector>

#include "twofactor/errors.hpp"
#include "twofactor/lyapunov.hpp"
#include "twofactor/model.hpp"
#include "twofactor/quadrature.hpp"

namespace twofactor {

/// A point of the coupled state space in difference coordinates:
/// y = y_tilde + s, d = |x - x_tilde|.
struct CouplingPoint {
  double y_tilde = 0.0;
  double s = 0.0;
  double d = 0.0;
};

/// Region of the ratio d / s: (i) d > kappa0 s, (ii) d <= s, (iii) in between.
enum class CaseBand { I = 1, II = 2, III = 3 };
CaseBand case_band(const LyapunovShape& shape, double s, double d) noexcept;
const char* to_string(CaseBand band) noexcept;

/// Which test function the coupling operator is applied to.
enum class TestFunction { V, G0 };

/// L* applied to the parts of V = c U + F at one point.
///
/// `lu` is L*U per unit c (closed form, orientation free). `lf` is the
/// larger of the two orientations sign(x - x_tilde) = +1 / -1 of L*F; `lf_sign`
/// records which. For the plain test function G0 = s + t, `lf` holds L*G0
/// and `lu`, `u` are zero.
struct CouplingEval {
  double lu = 0.0;
  double lu_error = 0.0;
  double lf = 0.0;
  double lf_error = 0.0;
  int lf_sign = 1;
  double u = 0.0;
  double f = 0.0;

  double value(double c) const noexcept { return c * lu + lf; }
  double error(double c) const noexcept { return c * lu_error + lf_error; }
  double test_value(double c) const noexcept { return c * u + f; }
};

/// Evaluates the coupling operator of `model` (kinds WW1, WW2, MIXED_Y, TYPE_I,
/// TYPE_II) at `point`.
///
/// Y part: -b s d1 G; with a Brownian Y driver, (1/2)(sqrt y + sqrt y~)^2 d11 G
/// for s < 1 and (1/2)(sqrt y - sqrt y~)^2 d11 G for s >= 1 under reflection
/// (WW1, TYPE_II), synchronous (sqrt y - sqrt y~)^2 otherwise; with a Y-jump
/// driver, s times the integral of G(s + z, d) - G - d1 G z against nu_beta.
/// X part: -lambda d d2 G, +|gamma| s d2 G for TYPE_II, and s times the
/// integral of G(s, |sigma d + z|) - G - sigma d2 G z against nu_alpha, where
/// sigma is the orientation of x - x_tilde. TYPE_I adds the synchronous
/// Brownian terms (1/2)(sqrt y - sqrt y~)^2 (d22 G + 2 rho sigma d12 G).
/// Throws DomainError for s <= 0 (the coalesced regime is certified
/// analytically with rate lambda).
CouplingEval coupling_generator_eval(const ModelSpec& model, const LyapunovShape& shape,
                                     const CouplingPoint& point, const QuadratureConfig& quad = {},
                                     TestFunction test = TestFunction::V);

/// Full value and error of L*V at one point for a given weight c.
Estimate coupling_generator_value(const ModelSpec& model, const LyapunovShape& shape, double c,
                                  const CouplingPoint& point, const QuadratureConfig& quad = {});

/// The X-jump integral of F at (s, d, sigma) split by the ratio of the
/// post-jump distance |sigma d + z| to s: below 1, inside [1, kappa0], above
/// kappa0. With `beta_direction` the split is of the Y-jump integral
/// F(s + z, d) by d / (s + z) instead, using the index of `law`.
struct JumpComponents {
  Estimate below;
  Estimate band;
  Estimate above;
  Estimate total() const { return below + band + above; }
};

JumpComponents jump_components(const StableLaw& law, const LyapunovShape& shape, double s, double d,
                               int sigma, bool beta_direction, const QuadratureConfig& quad = {});

struct GridSpec {
  double s_min = 1e-3;
  double s_max = 10.0;
  int n_s = 41;
  /// Values of d / s. Empty means: 0, 61 log-spaced values in [1e-2, 1e2]
  /// and the knots 1, 3/2, 2, kappa0.
  std::vector<double> ratios;
  std::vector<double> y_tilde = {0.0, 0.1, 1.0, 10.0};

  std::vector<CouplingPoint> points(const LyapunovShape& shape) const;
};

struct PointMargin {
  CouplingPoint point;
  CaseBand band = CaseBand::II;
  /// -L*G / G at the point (before subtracting zeta).
  double rate = 0.0;
  /// Quadrature error of L*G divided by G.
  double rate_error = 0.0;
};

struct DriftCertificate {
  std::string model;
  TestFunction test = TestFunction::V;
  double theta = 0.0;
  double delta = 0.0;
  double kappa0 = 0.0;
  double c = 0.0;
  double c_seed = 0.0;
  /// Grid estimate of the remainder constant used to seed c.
  double remainder_constant = 0.0;
  double zeta = 0.0;
  double lemma_c0 = 0.0;
  double quad_tol = 0.0;
  int n_s = 0;
  int n_ratio = 0;
  int n_y_tilde = 0;
  std::vector<CouplingPoint> grid;
  /// margins[i] = -L*V/V - zeta at grid[i]; quad_error[i] the matching error bound.
  std::vector<double> margins;
  std::vector<double> quad_error;
  std::size_t worst_index = 0;
  /// Soft model flags (model_flags); a certificate for a flagged model is a
  /// grid statement only.
  std::vector<std::string> flags;

  double min_margin() const;
};

/// No positive rate exists on the grid; carries the worst points.
class CertificateNotFound : public Error {
 public:
  CertificateNotFound(const std::string& what, std::vector<PointMargin> worst, double best_zeta)
      : Error(what), worst_(std::move(worst)), best_zeta_(best_zeta) {}

  /// Up to 20 points with the smallest -L*G/G, smallest first.
  const std::vector<PointMargin>& worst_points() const noexcept { return worst_; }
  /// The largest rate found over the searched weights (<= 0).
  double best_zeta() const noexcept { return best_zeta_; }

 private:
  std::vector<PointMargin> worst_;
  double best_zeta_;
};

struct SearchOptions {
  TestFunction test = TestFunction::V;
  /// Worker threads for grid evaluation; results do not depend on it.
  int threads = 1;
  /// The reported c is the smallest weight whose rate is within this
  /// fraction of the best rate found. Zero keeps the maximizer.
  double zeta_slack = 0.01;
};

/// Searches a weight c and a rate zeta > 0 with L*V <= -zeta V at every grid
/// point, quadrature errors subtracted.
///
/// The remainder constant C is the grid maximum of the positive part of L*F
/// beyond -lambda d, normalized as in the drift estimate the weight formula
/// comes from; c starts at 4(lambda + C)/b + 4C/(theta(1 - theta)) for a
/// Brownian Y driver and at 2 C / (b theta) for pure Y jumps. The rate
/// zeta(c) = min over points of -(L*V + err)/V is quasi-concave in c and is
/// maximized by bisection on the sign of its slope in log c; a second
/// bisection then moves c down to the smallest weight within
/// `zeta_slack` of that maximum.
/// Throws CertificateNotFound when the best zeta is not positive and
/// ParameterError for a model outside the certified kinds. Models outside
/// the ergodicity hypothesis are searched but carry kNonErgodicFlag.
DriftCertificate drift_certificate_search(const ModelSpec& model, const LyapunovShape& shape,
                                          const GridSpec& grid = {},
                                          const QuadratureConfig& quad = {},
                                          const SearchOptions& options = {});

/// Result of re-evaluating a certificate at sample points with a tighter
/// quadrature tolerance.
struct RecheckPoint {
  CouplingPoint point;
  double value = 0.0;
  double value_tight = 0.0;
  double error_bound = 0.0;
  double margin = 0.0;
  double margin_tight = 0.0;
};

/// Re-evaluates L*V at `n` grid points drawn with `seed` using
/// quad.tightened(factor).
std::vector<RecheckPoint> recheck_certificate(const ModelSpec& model, const LyapunovShape& shape,
                                              const DriftCertificate& cert, int n,
                                              std::uint64_t seed, const QuadratureConfig& quad = {},
                                              double factor = 10.0);

}  // namespace twofactor
