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

#include "twofactor/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "twofactor/errors.hpp"
#include "twofactor/parallel.hpp"

namespace twofactor {

namespace {

bool reflected_kind(ModelKind kind) { return kind == ModelKind::WW1 || kind == ModelKind::TYPE_II; }

double root(double y, double index) { return index == 2.0 ? std::sqrt(y) : std::pow(y, 1.0 / index); }

/// Drift of the difference y - y_tilde. Linear drifts use -b s so that the
/// difference stays exact.
double y_drift_difference(const ModelSpec& spec, double y_tilde, double s) {
  if (spec.kind == ModelKind::GENERAL) return spec.drift1(y_tilde + s) - spec.drift1(y_tilde);
  return -spec.b * s;
}

void finish_y_step(CoupledState& state, double y_tilde_next, double s_prev, double s_next,
                   double dt, double coeff, const CoalescenceOptions& options, RandomStream& rng,
                   CouplingStats* stats, YStepResult& out) {
  if (y_tilde_next < 0.0) {
    y_tilde_next = 0.0;
    if (stats) ++stats->y_tilde_truncations;
  }
  state.y_tilde = y_tilde_next;
  out.hit = coalescence_detect(s_prev, s_next, dt, coeff, options, rng);
  if (out.hit.hit) {
    state.s = 0.0;
    state.coalesced = true;
    if (stats) {
      if (s_next <= options.eps_c) {
        ++stats->threshold_hits;
      } else {
        ++stats->bridge_hits;
      }
    }
  } else {
    state.s = s_next;
  }
  if (stats && !(state.s >= 0.0)) ++stats->order_violations;
}

}  // namespace

const char* to_string(YCoupling mode) noexcept {
  return mode == YCoupling::REFLECT_SYNC ? "REFLECT_SYNC" : "SYNC";
}

const char* to_string(XCoupling mode) noexcept {
  return mode == XCoupling::THINNING ? "THINNING" : "SHARED_INCREMENT";
}

YCoupling y_coupling_from_string(const std::string& name) {
  if (name == "REFLECT_SYNC") return YCoupling::REFLECT_SYNC;
  if (name == "SYNC") return YCoupling::SYNC;
  throw ParameterError("unknown y_mode '" + name + "'");
}

XCoupling x_coupling_from_string(const std::string& name) {
  if (name == "THINNING") return XCoupling::THINNING;
  if (name == "SHARED_INCREMENT") return XCoupling::SHARED_INCREMENT;
  throw ParameterError("unknown x_mode '" + name + "'");
}

CouplingMode default_coupling(const ModelSpec& spec) noexcept {
  return {reflected_kind(spec.kind) ? YCoupling::REFLECT_SYNC : YCoupling::SYNC,
          XCoupling::THINNING};
}

void check_coupling(const ModelSpec& spec, const CouplingMode& mode) {
  const YCoupling expected = default_coupling(spec).y_mode;
  if (mode.y_mode != expected) {
    throw ParameterError(std::string("model ") + to_string(spec.kind) + " requires y_mode " +
                         to_string(expected));
  }
}

CoupledState make_coupled_state(const State& first, const State& second, bool* swapped) {
  if (!(first.y >= 0.0) || !(second.y >= 0.0)) throw DomainError("initial y must be >= 0");
  const bool swap = first.y < second.y;
  const State& upper = swap ? second : first;
  const State& lower = swap ? first : second;
  if (swapped) *swapped = swap;
  CoupledState st;
  st.y_tilde = lower.y;
  st.s = upper.y - lower.y;
  st.x_tilde = lower.x;
  st.dx = upper.x - lower.x;
  if (st.s == 0.0) {
    st.coalesced = true;
    st.t_y = 0.0;
  }
  return st;
}

CouplingStats& CouplingStats::operator+=(const CouplingStats& o) {
  steps += o.steps;
  reflect_steps += o.reflect_steps;
  sync_steps += o.sync_steps;
  coalesced_steps += o.coalesced_steps;
  y_tilde_truncations += o.y_tilde_truncations;
  threshold_hits += o.threshold_hits;
  bridge_hits += o.bridge_hits;
  order_violations += o.order_violations;
  return *this;
}

CoalescenceResult coalescence_detect(double prev_s, double next_s, double dt, double coeff,
                                     const CoalescenceOptions& options, RandomStream& rng) {
  if (!(prev_s > 0.0)) throw DomainError("coalescence_detect requires prev_s > 0");
  if (next_s <= options.eps_c) {
    const double drop = prev_s - next_s;
    const double fraction = drop > 0.0 ? prev_s / drop : 1.0;
    return {true, std::clamp(fraction, 0.0, 1.0)};
  }
  if (!options.bridge || coeff == 0.0) return {false, 1.0};
  const double p = std::exp(-2.0 * prev_s * next_s / (coeff * coeff * dt));
  if (rng.uniform() < p) return {true, prev_s / (prev_s + next_s)};
  return {false, 1.0};
}

ThinningSampler::ThinningSampler(double alpha, double eps) : alpha_(alpha), eps_(eps) {
  if (!(eps > 0.0)) throw ParameterError("jump_eps must be > 0 for the thinning coupling");
  const StableLaw law(alpha);
  m0_ = levy_tail_mass(law, eps);
  m1_ = levy_tail_first_moment(law, eps);
  m2_ = levy_small_jump_variance(law, eps);
}

ThinningSampler::Split ThinningSampler::sample(double common_rate, double residual_rate,
                                               double dt, RandomStream& rng) const {
  Split out;
  const double total = common_rate + residual_rate;
  if (!(total > 0.0)) return out;
  const auto n = rng.poisson(total * m0_ * dt);
  const double inv = -1.0 / alpha_;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double size = eps_ * std::pow(rng.uniform_open(), inv);
    if (residual_rate == 0.0 || rng.uniform() * total < common_rate) {
      out.common += size;
    } else {
      out.residual += size;
    }
  }
  if (common_rate > 0.0) {
    out.common += std::sqrt(common_rate * m2_ * dt) * rng.normal() - common_rate * m1_ * dt;
  }
  if (residual_rate > 0.0) {
    out.residual += std::sqrt(residual_rate * m2_ * dt) * rng.normal() - residual_rate * m1_ * dt;
  }
  return out;
}

YStepResult coupled_y_step_reflect(CoupledState& state, double a, double b, double dt,
                                   RandomStream& rng, const CoalescenceOptions& options,
                                   CouplingStats* stats) {
  YStepResult out;
  const double yt = state.y_tilde;
  const double s = state.s;
  out.db = std::sqrt(dt) * rng.normal();
  if (state.coalesced) {
    if (stats) ++stats->coalesced_steps;
    double next = yt + (a - b * yt) * dt + std::sqrt(yt) * out.db;
    if (next < 0.0) {
      next = 0.0;
      if (stats) ++stats->y_tilde_truncations;
    }
    state.y_tilde = next;
    return out;
  }
  const bool reflect = s < 1.0;
  if (stats) ++(reflect ? stats->reflect_steps : stats->sync_steps);
  const double sy = std::sqrt(yt + s);
  const double syt = std::sqrt(yt);
  const double lower_db = reflect ? -out.db : out.db;
  const double coeff = reflect ? sy + syt : sy - syt;
  const double yt_next = yt + (a - b * yt) * dt + syt * lower_db;
  const double s_next = s - b * s * dt + coeff * out.db;
  finish_y_step(state, yt_next, s, s_next, dt, coeff, options, rng, stats, out);
  return out;
}

CouplingNoise::CouplingNoise(const ModelSpec& spec, const CouplingMode& mode, double jump_eps)
    : spec_(spec), mode_(mode) {
  check_coupling(spec, mode);
  const bool thin = mode.x_mode == XCoupling::THINNING;
  if (spec.alpha < 2.0) {
    law_x_.emplace(spec.alpha);
    if (thin) thin_x_.emplace(spec.alpha, jump_eps);
  }
  if (spec.has_y_jumps() && spec.beta < 2.0) {
    law_y_.emplace(spec.beta);
    if (thin) thin_y_.emplace(spec.beta, jump_eps);
  }
}

YStepResult CouplingNoise::y_step_sync(CoupledState& state, double dt, RandomStream& rng,
                                       const CoalescenceOptions& options,
                                       CouplingStats* stats) const {
  YStepResult out;
  const double yt = state.y_tilde;
  const double s = state.s;
  const bool merged = state.coalesced;
  const double y = yt + s;
  double common = spec_.y_drift(yt) * dt;
  double diff = merged ? 0.0 : y_drift_difference(spec_, yt, s);
  diff *= dt;
  double bridge_coeff = 0.0;
  if (spec_.has_y_brownian()) {
    out.db = std::sqrt(dt) * rng.normal();
    common += std::sqrt(yt) * out.db;
    if (!merged) {
      bridge_coeff = std::sqrt(y) - std::sqrt(yt);
      diff += bridge_coeff * out.db;
    }
  }
  if (spec_.has_y_jumps()) {
    if (thin_y_) {
      const auto split = thin_y_->sample(yt, merged ? 0.0 : s, dt, rng);
      common += split.common;
      diff += split.residual;
    } else {
      const double dl = law_y_ ? sample_stable_increment(*law_y_, dt, rng)
                               : std::sqrt(dt) * rng.normal();
      const double ct = root(yt, spec_.beta);
      common += ct * dl;
      if (!merged) {
        const double coeff = root(y, spec_.beta) - ct;
        diff += coeff * dl;
        if (!law_y_) bridge_coeff += coeff;
      }
    }
  }
  if (merged) {
    if (stats) ++stats->coalesced_steps;
    double next = yt + common;
    if (next < 0.0) {
      next = 0.0;
      if (stats) ++stats->y_tilde_truncations;
    }
    state.y_tilde = next;
    return out;
  }
  if (stats) ++stats->sync_steps;
  finish_y_step(state, yt + common, s, s + diff, dt, bridge_coeff, options, rng, stats, out);
  return out;
}

void CouplingNoise::x_step(CoupledState& state, double y_tilde_prev, double s_prev, double dt,
                           double db, RandomStream& rng) const {
  const double yt = y_tilde_prev;
  const double s = s_prev;
  const double y = yt + s;
  double common = 0.0;
  double diff = 0.0;
  if (thin_x_) {
    const auto split = thin_x_->sample(yt, s, dt, rng);
    common = split.common;
    diff = split.residual;
  } else {
    const double dz = law_x_ ? sample_stable_increment(*law_x_, dt, rng)
                             : std::sqrt(dt) * rng.normal();
    const double ct = root(yt, spec_.alpha);
    common = ct * dz;
    if (s != 0.0) diff = (root(y, spec_.alpha) - ct) * dz;
  }
  if (spec_.kind == ModelKind::TYPE_I) {
    const double dw = std::sqrt(dt) * rng.normal();
    const double mix = spec_.rho * db + std::sqrt(1.0 - spec_.rho * spec_.rho) * dw;
    const double ct = std::sqrt(yt);
    common += ct * mix;
    if (s != 0.0) diff += (std::sqrt(y) - ct) * mix;
  }
  if (spec_.kind == ModelKind::GENERAL) {
    const double xt = state.x_tilde;
    const double drift_t = spec_.drift2(xt);
    const double drift_diff = state.dx == 0.0 ? 0.0 : spec_.drift2(xt + state.dx) - drift_t;
    state.x_tilde = xt + drift_t * dt + common;
    state.dx = state.dx + drift_diff * dt + diff;
    return;
  }
  const DriftFactors f = drift_factors(spec_.lambda, dt);
  const double gamma = spec_.kind == ModelKind::TYPE_II ? spec_.gamma : 0.0;
  state.x_tilde = state.x_tilde * f.decay + (spec_.kappa - gamma * yt) * f.gain + common;
  double dx = state.dx * f.decay;
  if (gamma != 0.0 && s != 0.0) dx -= gamma * s * f.gain;
  if (diff != 0.0) dx += diff;
  state.dx = dx;
}

void coupled_x_step(CoupledState& state, double y_tilde_prev, double s_prev,
                    const ModelSpec& spec, double dt, const CouplingMode& mode, double jump_eps,
                    RandomStream& rng, double db) {
  CouplingNoise(spec, mode, jump_eps).x_step(state, y_tilde_prev, s_prev, dt, db, rng);
}

CoupledPath simulate_coupled(const ModelSpec& spec, const State& first, const State& second,
                             const CoupledConfig& cfg, const CouplingMode& mode) {
  const std::int64_t n = cfg.path.steps();
  if (cfg.record_every < 1) throw ParameterError("record_every must be >= 1");
  const double dt = cfg.path.dt;
  const CouplingNoise noise(spec, mode, cfg.path.jump_eps);
  RandomStream rng(cfg.path.seed);

  CoupledPath path;
  CoupledState st = make_coupled_state(first, second, &path.swapped);
  const std::size_t kept = static_cast<std::size_t>(n / cfg.record_every) + 2;
  path.times.reserve(kept);
  path.states.reserve(kept);
  path.times.push_back(0.0);
  path.states.push_back(st);

  const bool reflect = mode.y_mode == YCoupling::REFLECT_SYNC;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    const double yt_prev = st.y_tilde;
    const double s_prev = st.s;
    const bool was_coalesced = st.coalesced;
    const YStepResult ys = reflect ? coupled_y_step_reflect(st, spec.a, spec.b, dt, rng,
                                                            cfg.coalescence, &path.stats)
                                   : noise.y_step_sync(st, dt, rng, cfg.coalescence, &path.stats);
    if (!was_coalesced && st.coalesced) st.t_y = t_prev + ys.hit.fraction * dt;
    noise.x_step(st, yt_prev, s_prev, dt, ys.db, rng);
    ++path.stats.steps;
    if (k % cfg.record_every == 0 || k == n) {
      path.times.push_back(k == n ? cfg.path.t_end : static_cast<double>(k) * dt);
      path.states.push_back(st);
    }
  }
  path.t_y = st.t_y;
  return path;
}

CoupledEnsemble simulate_coupled_ensemble(const ModelSpec& spec, const State& first,
                                          const State& second, const CoupledConfig& cfg,
                                          const CouplingMode& mode, std::size_t n_paths,
                                          int threads) {
  CoupledEnsemble ens;
  ens.n_paths = n_paths;
  if (n_paths == 0) return ens;
  std::vector<CoupledPath> paths(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    CoupledConfig local = cfg;
    local.path.seed = split_seed(cfg.path.seed, i);
    paths[i] = simulate_coupled(spec, first, second, local, mode);
  });
  ens.times = paths.front().times;
  ens.swapped = paths.front().swapped;
  ens.states.reserve(n_paths * ens.times.size());
  ens.t_y.reserve(n_paths);
  for (auto& p : paths) {
    ens.states.insert(ens.states.end(), p.states.begin(), p.states.end());
    ens.t_y.push_back(p.t_y);
    ens.stats += p.stats;
    p = CoupledPath{};
  }
  return ens;
}

void write_coupled_csv(std::ostream& out, const CoupledPath& path) {
  out << "t,y,y_tilde,x,x_tilde,coalesced\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const CoupledState& st = path.states[i];
    out << format_double(path.times[i]) << ',' << format_double(st.y()) << ','
        << format_double(st.y_tilde) << ',' << format_double(st.x()) << ','
        << format_double(st.x_tilde) << ',' << (st.coalesced ? 1 : 0) << '\n';
  }
}

}  // namespace twofactor
