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

#include "twofactor/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "twofactor/errors.hpp"
#include "twofactor/random.hpp"

namespace twofactor {

double empirical_w1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) throw UsageError("empirical_w1_1d requires equal sample sizes");
  if (a.empty()) throw UsageError("empirical_w1_1d requires at least one sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

MeanEstimate mean_stderr(const std::vector<double>& samples) {
  if (samples.empty()) throw UsageError("mean of an empty sample");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

MedianOfMeans median_of_means(const std::vector<double>& samples, std::size_t blocks) {
  if (blocks == 0 || samples.size() < blocks) {
    throw UsageError("median_of_means needs at least one sample per block");
  }
  const std::size_t per = samples.size() / blocks;
  std::vector<double> means(blocks);
  for (std::size_t g = 0; g < blocks; ++g) {
    double s = 0.0;
    for (std::size_t i = 0; i < per; ++i) s += samples[g * per + i];
    means[g] = s / static_cast<double>(per);
  }
  const double med = quantile(means, 0.5);
  std::vector<double> dev(blocks);
  for (std::size_t g = 0; g < blocks; ++g) dev[g] = std::abs(means[g] - med);
  const double mad = quantile(dev, 0.5);
  return {med, 1.4826 * mad / std::sqrt(static_cast<double>(blocks))};
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  // The alternating series converges slowly for small x, where Q is 1 to
  // double precision anyway.
  if (x < 0.18) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw UsageError("ks_two_sample requires nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

double hill_tail_index(std::vector<double> samples, std::size_t k) {
  std::sort(samples.begin(), samples.end(), std::greater<>());
  std::size_t positive = 0;
  while (positive < samples.size() && samples[positive] > 0.0) ++positive;
  if (k < 1 || k >= positive) throw UsageError("hill_tail_index requires 1 <= k < #positive samples");
  const double threshold = std::log(samples[k]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(samples[i]) - threshold;
  return static_cast<double>(k) / sum;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("fit_line requires >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw UsageError("fit_line requires non-constant x");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

double quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw UsageError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("quantile level must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double pos = p * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * samples[lo] + w * samples[hi];
}

BootstrapColumns bootstrap_columns(
    const PathMatrix& m, std::size_t resamples, std::uint64_t seed,
    const std::function<double(const std::vector<double>&)>& statistic) {
  if (m.rows == 0 || m.cols == 0) throw UsageError("bootstrap of an empty matrix");
  BootstrapColumns out;
  const double n = static_cast<double>(m.rows);
  out.mean.assign(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out.mean[c] += m(r, c);
  }
  for (double& v : out.mean) v /= n;

  std::vector<double> draws(resamples * m.cols);
  std::vector<double> means(m.cols);
  RandomStream rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m.rows - 1);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::fill(means.begin(), means.end(), 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
      const double* row = &m.data[pick(rng.engine()) * m.cols];
      for (std::size_t c = 0; c < m.cols; ++c) means[c] += row[c];
    }
    for (std::size_t c = 0; c < m.cols; ++c) {
      means[c] /= n;
      draws[c * resamples + b] = means[c];
    }
    if (statistic) out.statistic.push_back(statistic(means));
  }

  out.std_error.resize(m.cols);
  out.ci_lo.resize(m.cols);
  out.ci_hi.resize(m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    std::vector<double> col(draws.begin() + static_cast<std::ptrdiff_t>(c * resamples),
                            draws.begin() + static_cast<std::ptrdiff_t>((c + 1) * resamples));
    if (resamples > 1) {
      const MeanEstimate est = mean_stderr(col);
      out.std_error[c] = est.std_error * std::sqrt(static_cast<double>(resamples));
      out.ci_lo[c] = quantile(col, 0.025);
      out.ci_hi[c] = quantile(col, 0.975);
    } else {
      out.ci_lo[c] = out.ci_hi[c] = out.mean[c];
    }
  }
  return out;
}

}  // namespace twofactor
