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

#include "twofactor/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twofactor/errors.hpp"
#include "twofactor/stable.hpp"

namespace twofactor {

namespace {

bool index_ok(double v) { return v > 1.0 && v <= 2.0; }

void check_drift(const MonotoneDrift& d, double rate, bool nonnegative_axis, const char* name,
                 std::vector<std::string>& bad, std::ostringstream& why) {
  double lo = d.range_lo;
  const double hi = d.range_hi;
  if (nonnegative_axis) lo = std::max(lo, 0.0);
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    bad.emplace_back(name);
    why << name << ": empty or non-finite check range; ";
    return;
  }
  constexpr int kSamples = 257;
  std::vector<double> v(kSamples);
  std::vector<double> bv(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    v[i] = lo + (hi - lo) * i / (kSamples - 1);
    bv[i] = d(v[i]);
  }
  for (int i = 0; i < kSamples; ++i) {
    for (int j = 0; j < i; ++j) {
      if (bv[i] - bv[j] > -rate * (v[i] - v[j]) + 1e-12) {
        bad.emplace_back(name);
        why << name << ": monotonicity with constant " << rate << " fails between " << v[j]
            << " and " << v[i] << "; ";
        return;
      }
    }
  }
}

}  // namespace

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::WW1: return "WW1";
    case ModelKind::WW2: return "WW2";
    case ModelKind::MIXED_Y: return "MIXED_Y";
    case ModelKind::TYPE_I: return "TYPE_I";
    case ModelKind::TYPE_II: return "TYPE_II";
    case ModelKind::GENERAL: return "GENERAL";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  for (ModelKind k : {ModelKind::WW1, ModelKind::WW2, ModelKind::MIXED_Y, ModelKind::TYPE_I,
                      ModelKind::TYPE_II, ModelKind::GENERAL}) {
    if (name == to_string(k)) return k;
  }
  throw ParameterError("unknown model kind '" + name + "'");
}

ModelSpec validate_model(const ModelSpec& spec) {
  ModelSpec out = spec;
  std::vector<std::string> bad;
  std::ostringstream why;
  auto fail = [&](const char* field, const std::string& msg) {
    bad.emplace_back(field);
    why << field << ": " << msg << "; ";
  };
  const bool general = spec.kind == ModelKind::GENERAL;
  if (!index_ok(spec.alpha)) fail("alpha", "must lie in (1, 2]");
  if (spec.has_y_jumps()) {
    if (!index_ok(spec.beta)) fail("beta", "must lie in (1, 2]");
  } else {
    out.beta = 0.0;
  }
  if (!general) {
    if (!(spec.a >= 0.0) || !std::isfinite(spec.a)) fail("a", "must be finite and >= 0");
    if (!std::isfinite(spec.b)) fail("b", "must be finite");
    if (!std::isfinite(spec.kappa)) fail("kappa", "must be finite");
    if (!std::isfinite(spec.lambda)) fail("lambda", "must be finite");
  }
  if (spec.kind == ModelKind::TYPE_II) {
    if (!std::isfinite(spec.gamma)) fail("gamma", "must be finite");
  } else if (spec.gamma != 0.0) {
    fail("gamma", "only TYPE_II has Y-to-X drift feedback");
  }
  if (spec.kind == ModelKind::TYPE_I) {
    if (!(spec.rho >= -1.0 && spec.rho <= 1.0)) fail("rho", "must lie in [-1, 1]");
  } else if (spec.rho != 0.0) {
    fail("rho", "only TYPE_I has a correlated X diffusion");
  }
  if (general) {
    if (!(spec.lambda1 > 0.0)) fail("lambda1", "must be > 0");
    if (!(spec.lambda2 > 0.0)) fail("lambda2", "must be > 0");
    if (!(spec.drift1(0.0) >= 0.0)) fail("drift1", "b1(0) must be >= 0 to keep Y >= 0");
    if (spec.lambda1 > 0.0) check_drift(spec.drift1, spec.lambda1, true, "drift1", bad, why);
    if (spec.lambda2 > 0.0) check_drift(spec.drift2, spec.lambda2, false, "drift2", bad, why);
  }
  if (!bad.empty()) {
    throw ValidationError(bad, "invalid " + std::string(to_string(spec.kind)) + " model: " + why.str());
  }
  return out;
}

std::vector<std::string> model_flags(const ModelSpec& spec) {
  std::vector<std::string> flags;
  if (spec.kind != ModelKind::GENERAL && !(spec.b > 0.0 && spec.lambda > 0.0)) {
    flags.emplace_back(kNonErgodicFlag);
  }
  return flags;
}

double h_value(double x) noexcept {
  const double ax = std::abs(x);
  if (ax >= 2.0) return ax;
  const double x2 = x * x;
  return 0.75 + 0.375 * x2 - x2 * x2 / 64.0;
}

double h_first(double x) noexcept {
  if (x >= 2.0) return 1.0;
  if (x <= -2.0) return -1.0;
  return 0.75 * x - x * x * x / 16.0;
}

double h_second(double x) noexcept {
  if (std::abs(x) >= 2.0) return 0.0;
  return 0.75 - 0.1875 * x * x;
}

double moment_bound_coeff(const ModelSpec& spec) {
  const double h1 = kHFirstNorm;
  const double h2 = kHSecondNorm;
  double constant = 0.0;
  double coef_y = 0.0;
  double coef_h = 0.0;

  if (spec.kind == ModelKind::GENERAL) {
    // b1(y) <= b1(0) and (b2(x) - b2(0)) h'(x) <= 0 because x h'(x) >= 0.
    constant = std::max(spec.drift1(0.0), 0.0) + std::abs(spec.drift2(0.0)) * h1;
  } else {
    constant = spec.a + h1 * std::abs(spec.kappa) + 2.0 * h1 * std::abs(spec.lambda);
    coef_y = std::abs(spec.b);
    coef_h = h1 * std::abs(spec.lambda);
  }
  if (spec.alpha == 2.0) {
    coef_y += 0.5 * h2;
  } else {
    const StableLaw law(spec.alpha);
    coef_y += 0.5 * h2 * levy_small_jump_variance(law, 1.0) + 2.0 * h1 * levy_tail_first_moment(law, 1.0);
  }
  if (spec.kind == ModelKind::TYPE_I) coef_y += 0.5 * h2;
  if (spec.kind == ModelKind::TYPE_II) coef_y += std::abs(spec.gamma) * h1;
  return std::max({constant, coef_y, coef_h});
}

}  // namespace twofactor
