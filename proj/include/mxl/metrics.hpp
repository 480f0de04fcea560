// SPDX-License-Identifier: Apache-2.0
//
// mxl-mac: matrix exponential learning for the Gaussian vector MAC
// Copyright (C) 2026 The mxl-mac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MXL_METRICS_HPP
#define MXL_METRICS_HPP

#include "mxl/estimation.hpp"
#include "mxl/learners.hpp"
#include "mxl/mimo_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mxl {

/// r_n = R_n / R_0.
inline double normalized_throughput(double rate, double rate_uniform) {
  if (!(rate_uniform > 0.0)) throw std::invalid_argument("normalized_throughput: reference rate must be positive");
  return rate / rate_uniform;
}

/// eps_n = t_n^{-1} [sum_k log M_k + L^2/2 sum_{j<=n} gamma_j^2], t_n = sum_{j<=n} gamma_j.
/// Adaptive schedules are evaluated in their current (dropped or not) state.
inline double mean_guarantee_eps(const StepSchedule& schedule, const std::vector<Index>& tx_antennas,
                                 double lipschitz, long n) {
  if (n < 1) throw std::invalid_argument("mean_guarantee_eps: n must be positive");
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("mean_guarantee_eps: L must be nonnegative");
  double t = 0.0;
  double sq = 0.0;
  for (long j = 1; j <= n; ++j) {
    const double g = schedule(j);
    t += g;
    sq += g * g;
  }
  return (log_antenna_sum(tx_antennas) + 0.5 * lipschitz * lipschitz * sq) / t;
}

/// sum_j w_j x_j / sum_j w_j, accumulated online.
class WeightedAverage {
 public:
  void add(double weight, double x) {
    weight_ += weight;
    sum_ += weight * x;
  }
  double weight() const { return weight_; }
  double value() const { return weight_ > 0.0 ? sum_ / weight_ : std::numeric_limits<double>::quiet_NaN(); }

 private:
  double weight_ = 0.0;
  double sum_ = 0.0;
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // n - 1 normalization
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline SampleStats summarize(std::vector<double> xs) {
  SampleStats s;
  s.count = xs.size();
  if (xs.empty()) {
    s.mean = s.stddev = s.median = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  s.median = xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
  s.min = xs.front();
  s.max = xs.back();
  return s;
}

/// Fraction of runs with R_max - Rbar_n >= eps_n + z, given the per-run deficits R_max - Rbar_n.
inline double outage_frequency(const std::vector<double>& deficits, double eps, double z) {
  if (deficits.empty()) throw std::invalid_argument("outage_frequency: no runs");
  std::size_t hits = 0;
  for (double d : deficits) hits += d >= eps + z ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(deficits.size());
}

/// L = sqrt(sum_k P_k^2 V_k^2) with V_k^2 the largest |V_hat_k|_F^2 over `draws` feedback samples at q.
inline double lipschitz_estimate(const NetworkModel& model, const CovarianceProfile& q, const NoiseModel& noise,
                                 Rng& rng, int draws) {
  if (draws < 1) throw std::invalid_argument("lipschitz_estimate: need at least one draw");
  std::vector<double> worst(static_cast<std::size_t>(model.users()), 0.0);
  for (int d = 0; d < draws; ++d) {
    const auto v = estimate_gradients(model, q, noise, rng);
    for (std::size_t k = 0; k < v.size(); ++k) worst[k] = std::max(worst[k], std::pow(v[k].norm(), 2));
    if (noise.kind == NoiseModel::Kind::none) break;
  }
  double l2 = 0.0;
  for (std::size_t k = 0; k < worst.size(); ++k) l2 += std::pow(model.power(static_cast<Index>(k)), 2) * worst[k];
  return std::sqrt(l2);
}

}  // namespace mxl

#endif  // MXL_METRICS_HPP
