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
#include <random>

namespace twofactor {

/// SplitMix64 finalizer. Used for seeding and for deriving per-task seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the `index`-th independent task derived from a master seed.
///
/// split_seed(s, i) = splitmix64(s + (i + 1) * 0x9E3779B97F4A7C15). Ensemble
/// runners give path i the stream RandomStream(split_seed(seed, i)), so every
/// path's draws are fixed by (seed, i) regardless of thread scheduling.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// A seeded stream of random variates.
///
/// The engine is std::mt19937_64 seeded with splitmix64(seed). Uniforms use
/// the top 53 bits of one engine output, normals use the Marsaglia polar
/// method (pairs are cached), exponentials use inversion. Poisson and gamma
/// variates come from the standard library distributions, so bit-for-bit
/// reproducibility holds for a fixed seed and a fixed standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double normal() noexcept;

  double exponential() noexcept;

  std::uint64_t poisson(double mean);

  /// Gamma variate with the given shape and unit scale (shape > 0).
  double gamma(double shape);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace twofactor
