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

#include "twofactor/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "twofactor/errors.hpp"

namespace twofactor {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double l1;
  unsigned depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk_panel(const F& f, double a, double b, unsigned depth) {
  Panel p{a, b, 0.0, 0.0, 0.0, depth};
  p.value = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
  // With max_depth 0, Boost (checked on 1.74) returns the G7/K15 difference
  // of the rule on [-1, 1] without the (b - a) / 2 Jacobian; L1 is scaled.
  p.error *= 0.5 * (b - a);
  // Below this floor the G7/K15 difference is rounding noise.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * p.l1;
  if (p.error < floor) p.error = 0.0;
  return p;
}

// Globally adaptive G7/K15: bisect the panel with the largest error until the
// summed error is within rel_tol of the summed L1 mass (or abs_tol).
template <class F>
Estimate adaptive_gk(const F& f, double a, double b, const QuadratureConfig& cfg, double* l1) {
  constexpr std::size_t kMaxPanels = 4096;
  std::priority_queue<Panel> heap;
  heap.push(gk_panel(f, a, b, 0));
  double value = heap.top().value;
  double error = heap.top().error;
  double mass = heap.top().l1;
  std::vector<Panel> done;
  while (!heap.empty() && error > std::max(cfg.rel_tol * mass, cfg.abs_tol) &&
         heap.size() + done.size() < kMaxPanels) {
    Panel p = heap.top();
    heap.pop();
    if (p.error == 0.0 || p.depth >= cfg.max_depth) {
      done.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    const Panel left = gk_panel(f, p.a, mid, p.depth + 1);
    const Panel right = gk_panel(f, mid, p.b, p.depth + 1);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    mass += left.l1 + right.l1 - p.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running totals.
  value = 0.0;
  error = 0.0;
  mass = 0.0;
  auto add = [&](const Panel& p) {
    value += p.value;
    error += p.error;
    mass += p.l1;
  };
  for (const Panel& p : done) add(p);
  while (!heap.empty()) {
    add(heap.top());
    heap.pop();
  }
  if (l1) *l1 = mass;
  return {value, error};
}

// Accumulates values, error estimates and L1 mass of the pieces of one
// assembled integral so the tolerance can be judged on the whole.
struct Tally {
  Estimate est;
  double l1 = 0.0;

  void add(const Estimate& e, double mass) {
    est += e;
    l1 += mass;
  }
  void add_exact(double v) {
    est.value += v;
    est.error += 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v);
    l1 += std::abs(v);
  }
};

class JumpAssembler {
 public:
  JumpAssembler(const StableLaw& law, const JumpIncrement& inc, const QuadratureConfig& cfg)
      : law_(law), inc_(inc), cfg_(cfg), c_(inc.center) {
    if (!inc.d2phi) throw UsageError("jump increment needs a second derivative");
    if (!inc.slope_jumps.empty() && inc.slope_jumps.size() != inc.breakpoints.size()) {
      throw UsageError("slope_jumps must be empty or match breakpoints");
    }
    if (!(c_ >= 0.0) || !std::isfinite(c_)) throw UsageError("jump increment center must be >= 0");
    if (c_ > 0.0 && !inc.affine_beyond_last) {
      throw UsageError("a centered jump increment needs an affine tail");
    }
    for (std::size_t i = 0; i < inc.breakpoints.size(); ++i) {
      const double b = inc.breakpoints[i];
      if (!(c_ + b > 0.0) || !std::isfinite(b)) continue;
      points_.push_back({b, inc.slope_jumps.empty() ? 0.0 : inc.slope_jumps[i]});
    }
    std::sort(points_.begin(), points_.end(),
              [](const Point& l, const Point& r) { return l.w < r.w; });
    // Merge coincident breakpoints.
    std::vector<Point> merged;
    for (const Point& p : points_) {
      if (!merged.empty() && p.w == merged.back().w) {
        merged.back().jump += p.jump;
      } else {
        merged.push_back(p);
      }
    }
    points_ = std::move(merged);
    if (inc.affine_beyond_last) {
      horizon_ = points_.empty() ? -c_ : points_.back().w;
    } else {
      if (!inc.phi || !inc.dphi) throw UsageError("direct tail needs phi and dphi");
      const double last = points_.empty() ? 0.0 : points_.back().w;
      horizon_ = std::max(inc.scale > 0.0 ? inc.scale : 1.0, 2.0 * last);
    }
  }

  // Integral of phi dnu over [lo, hi] in offset coordinates; hi may be +inf.
  Estimate on(double lo, double hi) {
    if (!(lo >= -c_) || !(hi >= lo)) {
      throw DomainError("jump integral range must satisfy 0 <= lo <= hi");
    }
    Tally t;
    if (lo == hi) return t.est;
    if (c_ + lo > 0.0) t.add_exact(-boundary(lo));
    const double top = std::min(hi, horizon_);
    if (top > lo) {
      curvature(lo, top, t);
      for (const Point& p : points_) {
        if (p.w > lo && p.w < hi && p.jump != 0.0) t.add_exact(p.jump * K(p.w));
      }
    }
    if (hi < kInf) {
      if (hi > horizon_ && !inc_.affine_beyond_last) {
        t.add_exact(boundary(std::max(lo, horizon_)));
        t.add(direct(std::max(lo, horizon_), hi), 0.0);
        t.l1 += std::abs(t.est.value);
      } else {
        t.add_exact(boundary(hi));
      }
    } else if (!inc_.affine_beyond_last) {
      const double from = std::max(lo, horizon_);
      t.add_exact(boundary(from));
      double mass = 0.0;
      Estimate tail = direct_tail(from, &mass);
      t.add(tail, mass);
    } else if (lo >= horizon_) {
      // phi is affine on [lo, inf): p0 + p1 z with p1 = phi'(lo).
      const double p1 = inc_.dphi ? inc_.dphi(lo) : 0.0;
      const double p0 = inc_.phi ? inc_.phi(lo) - p1 * (c_ + lo) : 0.0;
      Tally exact;
      exact.add_exact(p0 * levy_tail_mass(law_, c_ + lo) +
                      p1 * levy_tail_first_moment(law_, c_ + lo));
      return exact.est;
    }
    check(t);
    return t.est;
  }

  Estimate total() {
    Tally t;
    if (horizon_ > -c_) {
      curvature(-c_, horizon_, t);
      for (const Point& p : points_) {
        if (p.jump != 0.0) t.add_exact(p.jump * K(p.w));
      }
    }
    if (!inc_.affine_beyond_last) {
      t.add_exact(boundary(horizon_));
      double mass = 0.0;
      Estimate tail = direct_tail(horizon_, &mass);
      t.add(tail, mass);
    }
    check(t);
    return t.est;
  }

 private:
  struct Point {
    double w;
    double jump;
  };

  // K at the jump size c + w.
  double K(double w) const { return levy_double_tail(law_, c_ + w); }

  // -phi nu((z, inf)) - phi' K(z) at z = c + w: the integration-by-parts remainder.
  double boundary(double w) const {
    const double z = c_ + w;
    if (z <= 0.0) return 0.0;
    const double phi = inc_.phi ? inc_.phi(w) : 0.0;
    const double dphi = inc_.dphi ? inc_.dphi(w) : 0.0;
    return -phi * levy_tail_mass(law_, z) - dphi * levy_double_tail(law_, z);
  }

  // Integral of phi''(u) K(u) over offsets [lo, hi], split at breakpoints.
  void curvature(double lo, double hi, Tally& t) {
    std::vector<double> cuts{lo};
    for (const Point& p : points_) {
      if (p.w > lo && p.w < hi) cuts.push_back(p.w);
    }
    cuts.push_back(hi);
    const auto& d2 = inc_.d2phi;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double b = cuts[i + 1];
      double mass = 0.0;
      Estimate e;
      if (c_ + a == 0.0) {
        // u = zb v^k with k = 1 / (2 - alpha) absorbs the u^{1-alpha} singularity.
        const double alpha = law_.alpha();
        const double k = 1.0 / (2.0 - alpha);
        const double zb = c_ + b;
        const double pref = k * std::pow(zb, 2.0 - alpha) * law_.c_alpha() / (alpha * (alpha - 1.0));
        const double c = c_;
        e = integrate_interval([&](double v) { return d2(zb * std::pow(v, k) - c); }, 0.0, 1.0, cfg_,
                               &mass);
        e = pref * e;
        mass *= pref;
      } else {
        e = integrate_interval([&](double w) { return d2(w) * K(w); }, a, b, cfg_, &mass);
      }
      t.add(e, mass);
    }
  }

  Estimate direct(double a, double b) {
    const auto& phi = inc_.phi;
    const StableLaw& law = law_;
    return integrate_interval([&](double z) { return phi(z) * law.density(z); }, a, b, cfg_);
  }

  // Integral of phi dnu over (z0, inf) with z = z0 v^{-1/(alpha-1)}, v in (0, 1].
  Estimate direct_tail(double z0, double* mass) {
    const double alpha = law_.alpha();
    const double expo = -1.0 / (alpha - 1.0);
    const double pref = law_.c_alpha() * std::pow(z0, -alpha) / (alpha - 1.0);
    const auto& phi = inc_.phi;
    auto f = [&](double v) {
      const double z = z0 * std::pow(v, expo);
      if (!std::isfinite(z)) return 0.0;
      return phi(z) * std::pow(v, -expo);
    };
    Estimate e = integrate_interval(f, 0.0, 1.0, cfg_, mass);
    *mass *= pref;
    return pref * e;
  }

  void check(const Tally& t) const {
    const double allowed = std::max(cfg_.rel_tol * t.l1, cfg_.abs_tol);
    if (!(t.est.error <= allowed) || !std::isfinite(t.est.value)) {
      throw NumericAccuracyError("Levy jump integral missed its tolerance (error " +
                                     std::to_string(t.est.error) + ", allowed " +
                                     std::to_string(allowed) + ")",
                                 t.est.error, allowed);
    }
  }

  const StableLaw& law_;
  const JumpIncrement& inc_;
  QuadratureConfig cfg_;
  double c_;
  std::vector<Point> points_;
  double horizon_ = 0.0;
};

}  // namespace

Estimate integrate_interval(const std::function<double(double)>& f, double a, double b,
                            const QuadratureConfig& cfg, double* l1) {
  if (!(b >= a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate_interval needs finite a <= b");
  }
  if (a == b) {
    if (l1) *l1 = 0.0;
    return {};
  }
  if (a > 0.0 && b / a > 8.0) {
    auto g = [&](double u) {
      const double z = std::exp(u);
      return f(z) * z;
    };
    return adaptive_gk(g, std::log(a), std::log(b), cfg, l1);
  }
  return adaptive_gk(f, a, b, cfg, l1);
}

double levy_double_tail(const StableLaw& law, double u) {
  if (!(u > 0.0)) throw DomainError("levy_double_tail requires u > 0");
  const double alpha = law.alpha();
  return law.c_alpha() * std::pow(u, 1.0 - alpha) / (alpha * (alpha - 1.0));
}

Estimate levy_jump_integral(const StableLaw& law, const JumpIncrement& inc,
                            const QuadratureConfig& cfg) {
  JumpAssembler assembler(law, inc, cfg);
  return assembler.total();
}

Estimate levy_jump_integral_on(const StableLaw& law, const JumpIncrement& inc, double lo,
                               double hi, const QuadratureConfig& cfg) {
  JumpAssembler assembler(law, inc, cfg);
  return assembler.on(lo, hi);
}

}  // namespace twofactor
