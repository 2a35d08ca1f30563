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

#include "twofactor/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "twofactor/parallel.hpp"
#include "twofactor/random.hpp"
#include "twofactor/stable.hpp"

namespace twofactor {

namespace {

constexpr double kRoundoff = 4.0 * std::numeric_limits<double>::epsilon();

bool reflected_y(ModelKind kind) { return kind == ModelKind::WW1 || kind == ModelKind::TYPE_II; }

void require_certified_kind(const ModelSpec& model) {
  if (model.kind == ModelKind::GENERAL) {
    throw ParameterError("the coupling operator is implemented for WW1, WW2, MIXED_Y, TYPE_I and TYPE_II");
  }
}

// phi(z) = F(s, |sigma d + z|) - F(s, d) - sigma d2F(s, d) z. For sigma = -1
// the increment is centered at z = d, so the callbacks see w = z - d and the
// post-jump distance |w| is exact however small s is against d.
JumpIncrement alpha_increment(const LyapunovShape& shape, double s, double d, int sigma) {
  const FValue f0 = F_eval(shape, s, d);
  const double slope = sigma * f0.d2;
  JumpIncrement inc;
  if (sigma < 0) {
    inc.center = d;
    inc.phi = [=, &shape](double w) {
      return F_eval(shape, s, std::abs(w)).value - f0.value - slope * (d + w);
    };
    inc.dphi = [=, &shape](double w) {
      return (w >= 0.0 ? 1.0 : -1.0) * F_eval(shape, s, std::abs(w)).d2 - slope;
    };
    inc.d2phi = [=, &shape](double w) { return F_eval(shape, s, std::abs(w)).d22; };
    for (double k : {1.0, 1.5, shape.kappa0()}) {
      inc.breakpoints.push_back(k * s);
      inc.breakpoints.push_back(-k * s);
    }
    inc.breakpoints.push_back(0.0);
  } else {
    inc.phi = [=, &shape](double z) { return F_eval(shape, s, d + z).value - f0.value - slope * z; };
    inc.dphi = [=, &shape](double z) { return F_eval(shape, s, d + z).d2 - slope; };
    inc.d2phi = [=, &shape](double z) { return F_eval(shape, s, d + z).d22; };
    for (double k : {1.0, 1.5, shape.kappa0()}) inc.breakpoints.push_back(k * s - d);
  }
  inc.affine_beyond_last = true;
  inc.scale = s;
  return inc;
}

// phi(z) = F(s + z, d) - F(s, d) - d1F(s, d) z.
JumpIncrement beta_increment(const LyapunovShape& shape, double s, double d) {
  const FValue f0 = F_eval(shape, s, d);
  JumpIncrement inc;
  inc.phi = [=, &shape](double z) { return F_eval(shape, s + z, d).value - f0.value - f0.d1 * z; };
  inc.dphi = [=, &shape](double z) { return F_eval(shape, s + z, d).d1 - f0.d1; };
  inc.d2phi = [=, &shape](double z) { return F_eval(shape, s + z, d).d11; };
  for (double k : {1.0, 1.5, shape.kappa0()}) inc.breakpoints.push_back(d / k - s);
  inc.affine_beyond_last = true;
  inc.scale = s;
  return inc;
}

// Integral of (s + z)^theta - s^theta - theta s^{theta-1} z against nu_beta,
// equal to s^{theta-beta} Gamma(beta - theta) / (beta Gamma(-theta)).
double power_jump_integral(double beta, double theta, double s) {
  return std::pow(s, theta - beta) * std::tgamma(beta - theta) / (beta * std::tgamma(-theta));
}

struct Geometry {
  double s;
  double d;
  double y_tilde;
  double y;
  double sum_sq;   // (sqrt y + sqrt y~)^2
  double diff_sq;  // (sqrt y - sqrt y~)^2
  double diff_y;   // Y diffusion coefficient of the difference, squared
};

Geometry geometry(const ModelSpec& model, const CouplingPoint& p) {
  Geometry g{};
  g.s = p.s;
  g.d = p.d;
  g.y_tilde = p.y_tilde;
  g.y = p.y_tilde + p.s;
  const double root_sum = std::sqrt(g.y) + std::sqrt(p.y_tilde);
  g.sum_sq = root_sum * root_sum;
  g.diff_sq = (p.s / root_sum) * (p.s / root_sum);
  if (model.has_y_brownian()) {
    g.diff_y = reflected_y(model.kind) && p.s < 1.0 ? g.sum_sq : g.diff_sq;
  }
  return g;
}

Estimate lf_oriented(const ModelSpec& model, const LyapunovShape& shape, const Geometry& g,
                     int sigma, const Estimate& beta_part, const QuadratureConfig& quad) {
  const FValue f0 = F_eval(shape, g.s, g.d);
  Estimate out;
  out.value = -model.b * g.s * f0.d1 + 0.5 * g.diff_y * f0.d11 - model.lambda * g.d * f0.d2;
  if (model.kind == ModelKind::TYPE_II) out.value += std::abs(model.gamma) * g.s * f0.d2;
  if (model.kind == ModelKind::TYPE_I) {
    out.value += 0.5 * g.diff_sq * (f0.d22 + 2.0 * model.rho * sigma * f0.d12);
  }
  if (model.alpha == 2.0) {
    out.value += 0.5 * g.diff_sq * f0.d22;
  } else {
    const StableLaw law(model.alpha);
    out += g.s * levy_jump_integral(law, alpha_increment(shape, g.s, g.d, sigma), quad);
  }
  out += beta_part;
  out.error += kRoundoff * std::abs(out.value);
  return out;
}

Estimate lg0_oriented(const ModelSpec& model, const Geometry& g, int sigma,
                      const QuadratureConfig& quad) {
  Estimate out;
  out.value = -model.b * g.s - model.lambda * g.d;
  if (model.kind == ModelKind::TYPE_II) out.value += std::abs(model.gamma) * g.s;
  if (model.alpha != 2.0 && sigma < 0 && g.d > 0.0) {
    const StableLaw law(model.alpha);
    const double d = g.d;
    JumpIncrement inc;
    inc.phi = [d](double z) { return std::abs(z - d) - d + z; };
    inc.dphi = [d](double z) { return z > d ? 2.0 : 0.0; };
    inc.d2phi = [](double) { return 0.0; };
    inc.breakpoints = {d};
    inc.slope_jumps = {2.0};
    inc.affine_beyond_last = true;
    inc.scale = d;
    out += g.s * levy_jump_integral(law, inc, quad);
  }
  out.error += kRoundoff * std::abs(out.value);
  return out;
}

}  // namespace

CaseBand case_band(const LyapunovShape& shape, double s, double d) noexcept {
  if (d <= s) return CaseBand::II;
  if (d > shape.kappa0() * s) return CaseBand::I;
  return CaseBand::III;
}

const char* to_string(CaseBand band) noexcept {
  switch (band) {
    case CaseBand::I: return "i";
    case CaseBand::II: return "ii";
    case CaseBand::III: return "iii";
  }
  return "?";
}

CouplingEval coupling_generator_eval(const ModelSpec& model, const LyapunovShape& shape,
                                     const CouplingPoint& point, const QuadratureConfig& quad,
                                     TestFunction test) {
  require_certified_kind(model);
  if (!(point.s > 0.0)) throw DomainError("coupling generator needs s > 0");
  if (!(point.d >= 0.0) || !(point.y_tilde >= 0.0)) {
    throw DomainError("coupling generator needs d >= 0 and y_tilde >= 0");
  }
  const Geometry g = geometry(model, point);
  CouplingEval ev;

  if (test == TestFunction::G0) {
    ev.f = g.s + g.d;
    Estimate best = lg0_oriented(model, g, 1, quad);
    ev.lf_sign = 1;
    if (g.d > 0.0) {
      const Estimate neg = lg0_oriented(model, g, -1, quad);
      if (neg.value + neg.error > best.value + best.error) {
        best = neg;
        ev.lf_sign = -1;
      }
    }
    ev.lf = best.value;
    ev.lf_error = best.error;
    return ev;
  }

  const double th = shape.theta();
  const double s_th = std::pow(g.s, th);
  const double curv = th * (th - 1.0) * s_th / (g.s * g.s);
  ev.u = g.s + s_th;
  ev.lu = -model.b * (g.s + th * s_th) + 0.5 * g.diff_y * curv;

  Estimate beta_part;
  if (model.has_y_jumps()) {
    if (model.beta == 2.0) {
      ev.lu += 0.5 * g.diff_sq * curv;
      beta_part.value = 0.5 * g.diff_sq * F_eval(shape, g.s, g.d).d11;
    } else {
      ev.lu += g.s * power_jump_integral(model.beta, th, g.s);
      const StableLaw law(model.beta);
      beta_part = g.s * levy_jump_integral(law, beta_increment(shape, g.s, g.d), quad);
    }
  }
  ev.lu_error = kRoundoff * (std::abs(ev.lu) + model.b * g.s + std::abs(curv) * g.sum_sq);
  ev.f = F_eval(shape, g.s, g.d).value;

  Estimate best = lf_oriented(model, shape, g, 1, beta_part, quad);
  ev.lf_sign = 1;
  if (g.d > 0.0) {
    const Estimate neg = lf_oriented(model, shape, g, -1, beta_part, quad);
    if (neg.value + neg.error > best.value + best.error) {
      best = neg;
      ev.lf_sign = -1;
    }
  }
  ev.lf = best.value;
  ev.lf_error = best.error;
  return ev;
}

Estimate coupling_generator_value(const ModelSpec& model, const LyapunovShape& shape, double c,
                                  const CouplingPoint& point, const QuadratureConfig& quad) {
  const CouplingEval ev = coupling_generator_eval(model, shape, point, quad);
  return {ev.value(c), ev.error(c)};
}

JumpComponents jump_components(const StableLaw& law, const LyapunovShape& shape, double s, double d,
                               int sigma, bool beta_direction, const QuadratureConfig& quad) {
  if (!(s > 0.0) || !(d >= 0.0)) throw DomainError("jump components need s > 0 and d >= 0");
  if (sigma != 1 && sigma != -1) throw DomainError("orientation must be +1 or -1");
  const JumpIncrement inc =
      beta_direction ? beta_increment(shape, s, d) : alpha_increment(shape, s, d, sigma);
  // Cuts and ratios are in the increment's own coordinate (offset from its center).
  const double c = inc.center;
  auto ratio = [&](double w) {
    return beta_direction ? d / (s + w) : std::abs(sigma * d + c + w) / s;
  };
  std::vector<double> cuts{-c};
  for (double b : inc.breakpoints) {
    if (b > -c) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  JumpComponents out;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < cuts.size() ? cuts[i + 1] : inf;
    const double mid = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + s;
    const double r = ratio(mid);
    const Estimate part = levy_jump_integral_on(law, inc, lo, hi, quad);
    if (r < 1.0) {
      out.below += part;
    } else if (r > shape.kappa0()) {
      out.above += part;
    } else {
      out.band += part;
    }
  }
  return out;
}

std::vector<CouplingPoint> GridSpec::points(const LyapunovShape& shape) const {
  if (!(s_min > 0.0) || !(s_max > s_min) || n_s < 2) {
    throw UsageError("grid needs 0 < s_min < s_max and n_s >= 2");
  }
  std::vector<double> r = ratios;
  if (r.empty()) {
    r.push_back(0.0);
    for (int i = 0; i < 61; ++i) r.push_back(std::pow(10.0, -2.0 + 4.0 * i / 60.0));
    for (double k : {1.0, 1.5, 2.0, shape.kappa0()}) r.push_back(k);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  std::vector<CouplingPoint> out;
  out.reserve(static_cast<std::size_t>(n_s) * r.size() * y_tilde.size());
  for (int i = 0; i < n_s; ++i) {
    const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) / (n_s - 1));
    for (double ratio : r) {
      for (double yt : y_tilde) out.push_back({yt, s, ratio * s});
    }
  }
  return out;
}

double DriftCertificate::min_margin() const {
  return margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
}

DriftCertificate drift_certificate_search(const ModelSpec& model, const LyapunovShape& shape,
                                          const GridSpec& grid, const QuadratureConfig& quad,
                                          const SearchOptions& options) {
  require_certified_kind(model);
  const double th = shape.theta();
  if (model.kind == ModelKind::WW2 && th > 2.0 - std::max(model.alpha, model.beta) + 1e-12) {
    throw ParameterError("pure-jump Y certificates need theta <= 2 - max(alpha, beta)");
  }
  const std::vector<CouplingPoint> pts = grid.points(shape);
  std::vector<CouplingEval> evals(pts.size());
  parallel_for(pts.size(), options.threads, [&](std::size_t i) {
    evals[i] = coupling_generator_eval(model, shape, pts[i], quad, options.test);
  });

  DriftCertificate cert;
  cert.model = to_string(model.kind);
  cert.flags = model_flags(model);
  cert.test = options.test;
  cert.theta = th;
  cert.delta = shape.delta();
  cert.kappa0 = shape.kappa0();
  cert.quad_tol = quad.rel_tol;
  cert.lemma_c0 = lemma_bounds_check(shape);
  cert.n_s = grid.n_s;
  cert.n_y_tilde = static_cast<int>(grid.y_tilde.size());
  cert.n_ratio = static_cast<int>(pts.size() / (grid.n_s * grid.y_tilde.size()));

  auto zeta_at = [&](double c) {
    double z = std::numeric_limits<double>::infinity();
    for (const CouplingEval& e : evals) {
      z = std::min(z, -(e.value(c) + e.error(c)) / e.test_value(c));
    }
    return z;
  };
  auto worst_points = [&](double c) {
    std::vector<PointMargin> all(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double v = evals[i].test_value(c);
      all[i] = {pts[i], case_band(shape, pts[i].s, pts[i].d), -evals[i].value(c) / v,
                evals[i].error(c) / v};
    }
    const std::size_t keep = std::min<std::size_t>(20, all.size());
    std::partial_sort(all.begin(), all.begin() + keep, all.end(),
                      [](const PointMargin& l, const PointMargin& r) { return l.rate < r.rate; });
    all.resize(keep);
    return all;
  };

  double c = 0.0;
  if (options.test == TestFunction::V) {
    double big_c = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const CouplingEval& e = evals[i];
      const double s = pts[i].s;
      const double d = pts[i].d;
      double ci;
      if (reflected_y(model.kind)) {
        const double yt = pts[i].y_tilde;
        const double root_sum = std::sqrt(yt + s) + std::sqrt(yt);
        const double denom = 2.0 * s + (s < 1.0 ? root_sum * root_sum / s : 0.0);
        ci = (e.lf + model.lambda * d - 2.0 * model.lambda * s) / denom;
      } else {
        ci = (e.lf + model.lambda * d) / e.u;
      }
      big_c = std::max(big_c, ci);
    }
    double seed;
    if (reflected_y(model.kind)) {
      seed = (model.b > 0.0 ? 4.0 * (model.lambda + big_c) / model.b : 0.0) +
             4.0 * big_c / (th * (1.0 - th));
    } else {
      seed = model.b > 0.0 ? 2.0 * big_c / (model.b * th) : 0.0;
    }
    if (!(seed > 0.0) || !std::isfinite(seed)) seed = 1.0;
    cert.remainder_constant = big_c;
    cert.c_seed = seed;

    // zeta(c) is a minimum of linear-fractional functions of c, hence
    // quasi-concave: bisect on the sign of its slope in log c.
    double lo = std::log(seed) - 8.0 * std::log(10.0);
    double hi = std::log(seed) + 8.0 * std::log(10.0);
    constexpr double kProbe = 1e-7;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double up = zeta_at(std::exp(mid + kProbe));
      const double down = zeta_at(std::exp(mid - kProbe));
      if (up > down) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double best = 0.5 * (lo + hi);
    if (zeta_at(seed) > zeta_at(std::exp(best))) best = std::log(seed);
    // zeta(c) flattens as c grows and U swamps F; take the smallest c within
    // the requested fraction of the best rate so F keeps its weight.
    const double target = zeta_at(std::exp(best));
    if (target > 0.0 && options.zeta_slack > 0.0) {
      const double goal = (1.0 - options.zeta_slack) * target;
      double below = std::log(seed) - 8.0 * std::log(10.0);
      double above = best;
      if (zeta_at(std::exp(below)) < goal) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (below + above);
          if (zeta_at(std::exp(mid)) >= goal) {
            above = mid;
          } else {
            below = mid;
          }
        }
      }
      best = above;
    }
    c = std::exp(best);
  }
  const double zeta = zeta_at(c);
  if (!(zeta > 0.0)) {
    auto worst = worst_points(c);
    std::string where = worst.empty() ? std::string("?")
                                      : std::string("case (") + to_string(worst.front().band) + ")";
    throw CertificateNotFound("no positive contraction rate on the grid (best zeta " +
                                  std::to_string(zeta) + ", worst point in " + where + ")",
                              std::move(worst), zeta);
  }
  cert.c = c;
  cert.zeta = zeta;
  cert.grid = pts;
  cert.margins.resize(pts.size());
  cert.quad_error.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = evals[i].test_value(c);
    cert.margins[i] = -evals[i].value(c) / v - zeta;
    cert.quad_error[i] = evals[i].error(c) / v;
  }
  cert.worst_index = static_cast<std::size_t>(
      std::min_element(cert.margins.begin(), cert.margins.end()) - cert.margins.begin());
  return cert;
}

std::vector<RecheckPoint> recheck_certificate(const ModelSpec& model, const LyapunovShape& shape,
                                              const DriftCertificate& cert, int n,
                                              std::uint64_t seed, const QuadratureConfig& quad,
                                              double factor) {
  if (cert.grid.empty()) throw UsageError("certificate has no grid");
  RandomStream rng(seed);
  const QuadratureConfig tight = quad.tightened(factor);
  std::vector<RecheckPoint> out;
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(rng.uniform() * cert.grid.size());
    const CouplingPoint& p = cert.grid[i];
    const CouplingEval loose = coupling_generator_eval(model, shape, p, quad, cert.test);
    const CouplingEval fine = coupling_generator_eval(model, shape, p, tight, cert.test);
    const double v = loose.test_value(cert.c);
    RecheckPoint r;
    r.point = p;
    r.value = loose.value(cert.c);
    r.value_tight = fine.value(cert.c);
    r.error_bound = loose.error(cert.c);
    r.margin = -r.value / v - cert.zeta;
    r.margin_tight = -r.value_tight / v - cert.zeta;
    out.push_back(r);
  }
  return out;
}

}  // namespace twofactor
