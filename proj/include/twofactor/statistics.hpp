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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace twofactor {

/// W1 distance between two empirical laws with the same number of atoms:
/// (1/n) sum |a_(i) - b_(i)| over the sorted samples. Throws UsageError on a
/// length mismatch or empty input.
double empirical_w1_1d(std::vector<double> a, std::vector<double> b);

struct MeanEstimate {
  double mean = 0.0;
  /// Standard error of the mean.
  double std_error = 0.0;
};

/// Sample mean and the usual standard error s / sqrt(n).
MeanEstimate mean_stderr(const std::vector<double>& samples);

struct MedianOfMeans {
  double estimate = 0.0;
  /// 1.4826 * MAD of the block means / sqrt(blocks).
  double error = 0.0;
};

/// Median of the means of `blocks` consecutive blocks (the tail that does
/// not fill a block is dropped).
MedianOfMeans median_of_means(const std::vector<double>& samples, std::size_t blocks);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. The p-value uses the asymptotic
/// Kolmogorov series with the effective size correction
/// (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D, ne = n m / (n + m).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_survival(double x);

/// Hill estimate of the right-tail index from the k largest observations.
/// Throws UsageError unless 1 <= k < number of positive samples.
double hill_tail_index(std::vector<double> samples, std::size_t k);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Ordinary least-squares standard error of the slope (0 for two points).
  double slope_stderr = 0.0;
};

/// Least-squares line through (x_i, y_i). Throws UsageError for fewer than
/// two points or constant x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Row-major matrix of per-path values: rows are paths, columns are times.
struct PathMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct BootstrapColumns {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  /// Statistic of each resample, one entry per resample (empty without one).
  std::vector<double> statistic;
};

/// Nonparametric bootstrap over rows (paths). Column means come from the
/// full sample; standard errors and 95% percentile intervals from
/// `resamples` row resamples drawn with RandomStream(seed). If `statistic` is
/// given it is evaluated on every resample's column means.
BootstrapColumns bootstrap_columns(
    const PathMatrix& m, std::size_t resamples, std::uint64_t seed,
    const std::function<double(const std::vector<double>&)>& statistic = {});

/// Empirical quantile by linear interpolation of the order statistics, p in [0, 1].
double quantile(std::vector<double> samples, double p);

}  // namespace twofactor
