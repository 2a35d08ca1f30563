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
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "twofactor/model.hpp"
#include "twofactor/path.hpp"
#include "twofactor/random.hpp"
#include "twofactor/stable.hpp"

namespace twofactor {

/// Coupling of the first components: reflection of the Brownian increment
/// while 0 < y - y_tilde < 1 and shared increments beyond (REFLECT_SYNC), or
/// shared noise throughout (SYNC).
enum class YCoupling { REFLECT_SYNC, SYNC };

/// Coupling of the stable drivers. SHARED_INCREMENT feeds one increment to
/// both legs. THINNING splits the jump intensity of the upper leg into a
/// common part (rate y_tilde) and a residual part (rate y - y_tilde) that
/// only the upper leg sees. The choice applies to the X driver and, for
/// models with jumps in Y, to the Y driver as well.
enum class XCoupling { SHARED_INCREMENT, THINNING };

struct CouplingMode {
  YCoupling y_mode = YCoupling::REFLECT_SYNC;
  XCoupling x_mode = XCoupling::THINNING;
};

const char* to_string(YCoupling mode) noexcept;
const char* to_string(XCoupling mode) noexcept;
YCoupling y_coupling_from_string(const std::string& name);
XCoupling x_coupling_from_string(const std::string& name);

/// REFLECT_SYNC for WW1 and TYPE_II, SYNC otherwise; THINNING for X.
CouplingMode default_coupling(const ModelSpec& spec) noexcept;

/// Throws ParameterError if the Y mode does not match the model kind.
void check_coupling(const ModelSpec& spec, const CouplingMode& mode);

/// Ordered pair of states stored as (y_tilde, s = y - y_tilde) and
/// (x_tilde, dx = x - x_tilde). s >= 0 by construction and s == 0 exactly
/// once the first components have met.
struct CoupledState {
  double y_tilde = 0.0;
  double s = 0.0;
  double x_tilde = 0.0;
  double dx = 0.0;
  bool coalesced = false;
  /// Coalescence time of the first components, NaN before it.
  double t_y = std::numeric_limits<double>::quiet_NaN();

  double y() const noexcept { return y_tilde + s; }
  double x() const noexcept { return x_tilde + dx; }
};

/// Orders two initial states by their first component. `swapped` reports
/// whether `second` became the upper leg. Equal first components start
/// coalesced with T_Y = 0.
CoupledState make_coupled_state(const State& first, const State& second, bool* swapped = nullptr);

struct CouplingStats {
  std::int64_t steps = 0;
  std::int64_t reflect_steps = 0;
  std::int64_t sync_steps = 0;
  std::int64_t coalesced_steps = 0;
  std::int64_t y_tilde_truncations = 0;
  std::int64_t threshold_hits = 0;
  std::int64_t bridge_hits = 0;
  /// Steps that ended with y < y_tilde; zero by construction.
  std::int64_t order_violations = 0;

  CouplingStats& operator+=(const CouplingStats& o);
};

struct CoalescenceOptions {
  /// Absolute threshold below which the difference counts as zero.
  double eps_c = 1e-12;
  /// Brownian-bridge crossing test inside each step.
  bool bridge = true;
};

struct CoalescenceResult {
  bool hit = false;
  /// Position of the hit inside the step, in [0, 1].
  double fraction = 1.0;
};

/// Decides whether the difference process reached 0 during a step from
/// prev_s > 0 to next_s (before any clamping).
///
/// Hit if next_s <= eps_c (fraction by linear interpolation), otherwise with
/// the Brownian-bridge probability exp(-2 prev_s next_s / (coeff^2 dt)) tested
/// against one uniform draw (fraction prev_s / (prev_s + next_s)). No uniform
/// is drawn when coeff == 0 or the bridge test is disabled.
CoalescenceResult coalescence_detect(double prev_s, double next_s, double dt, double coeff,
                                     const CoalescenceOptions& options, RandomStream& rng);

/// Jump increments of the upper and lower legs under the thinning coupling.
///
/// Jumps above `eps` arrive at rate (common_rate + residual_rate) nu((eps, inf))
/// with Pareto sizes eps U^{-1/alpha}; each is common with probability
/// common_rate / (common_rate + residual_rate). Jumps below eps are replaced
/// by a centred Gaussian of variance rate * M2(eps) dt per part, and each part
/// carries its compensator -rate * m1(eps) dt.
class ThinningSampler {
 public:
  ThinningSampler(double alpha, double eps);

  struct Split {
    double common = 0.0;
    double residual = 0.0;
  };

  Split sample(double common_rate, double residual_rate, double dt, RandomStream& rng) const;

  double alpha() const noexcept { return alpha_; }
  double eps() const noexcept { return eps_; }
  double large_jump_rate() const noexcept { return m0_; }
  double large_jump_mean() const noexcept { return m1_; }
  double small_jump_variance() const noexcept { return m2_; }

 private:
  double alpha_;
  double eps_;
  double m0_;
  double m1_;
  double m2_;
};

struct YStepResult {
  /// Brownian increment of the upper leg (0 without a Brownian part).
  double db = 0.0;
  CoalescenceResult hit;
};

/// One step of the reflection/synchronous coupling of
/// dY = (a - bY)dt + sqrt(Y) dB. The branch is chosen from s at the left
/// endpoint: s < 1 mirrors the increment for the lower leg and the
/// difference moves with coefficient sqrt(y) + sqrt(y_tilde); s >= 1 shares it
/// and the coefficient is sqrt(y) - sqrt(y_tilde). y_tilde is clamped at 0.
/// After coalescence both legs share every increment.
YStepResult coupled_y_step_reflect(CoupledState& state, double a, double b, double dt,
                                   RandomStream& rng, const CoalescenceOptions& options,
                                   CouplingStats* stats = nullptr);

/// Noise helpers shared by the coupled X and Y updates of one model.
class CouplingNoise {
 public:
  CouplingNoise(const ModelSpec& spec, const CouplingMode& mode, double jump_eps);

  const ModelSpec& spec() const noexcept { return spec_; }
  const CouplingMode& mode() const noexcept { return mode_; }

  /// Synchronous step of the first components (shared Brownian increment,
  /// jumps coupled per x_mode).
  YStepResult y_step_sync(CoupledState& state, double dt, RandomStream& rng,
                          const CoalescenceOptions& options, CouplingStats* stats) const;

  /// Coupled X step with noise coefficients frozen at the left-endpoint
  /// values (y_tilde_prev, s_prev). `db` is the Y Brownian increment used by
  /// TYPE_I correlation.
  void x_step(CoupledState& state, double y_tilde_prev, double s_prev, double dt, double db,
              RandomStream& rng) const;

 private:
  ModelSpec spec_;
  CouplingMode mode_;
  std::optional<StableLaw> law_x_;
  std::optional<StableLaw> law_y_;
  std::optional<ThinningSampler> thin_x_;
  std::optional<ThinningSampler> thin_y_;
};

/// Coupled X step for a single call site; see CouplingNoise::x_step.
void coupled_x_step(CoupledState& state, double y_tilde_prev, double s_prev,
                    const ModelSpec& spec, double dt, const CouplingMode& mode, double jump_eps,
                    RandomStream& rng, double db = 0.0);

struct CoupledConfig {
  PathConfig path;
  CoalescenceOptions coalescence;
  /// Keep every k-th grid state (the final state is always kept).
  std::int64_t record_every = 1;
};

struct CoupledPath {
  std::vector<double> times;
  std::vector<CoupledState> states;
  double t_y = std::numeric_limits<double>::quiet_NaN();
  bool swapped = false;
  CouplingStats stats;
};

/// Simulates the coupled pair from (first, second) on the grid of cfg.path,
/// drawing from RandomStream(cfg.path.seed). Per step: Y update (including
/// the coalescence test), then X update with left-endpoint coefficients.
CoupledPath simulate_coupled(const ModelSpec& spec, const State& first, const State& second,
                             const CoupledConfig& cfg, const CouplingMode& mode);

struct CoupledEnsemble {
  std::vector<double> times;
  std::size_t n_paths = 0;
  /// Path-major: states[p * times.size() + k].
  std::vector<CoupledState> states;
  std::vector<double> t_y;
  bool swapped = false;
  CouplingStats stats;

  const CoupledState& at(std::size_t path, std::size_t k) const {
    return states[path * times.size() + k];
  }
};

/// n_paths independent coupled paths; path i uses seed split_seed(cfg.path.seed, i).
/// Results do not depend on `threads`.
CoupledEnsemble simulate_coupled_ensemble(const ModelSpec& spec, const State& first,
                                          const State& second, const CoupledConfig& cfg,
                                          const CouplingMode& mode, std::size_t n_paths,
                                          int threads = 1);

/// Writes `t,y,y_tilde,x,x_tilde,coalesced` rows with 17 significant digits.
void write_coupled_csv(std::ostream& out, const CoupledPath& path);

}  // namespace twofactor
