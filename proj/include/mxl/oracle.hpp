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

#ifndef MXL_ORACLE_HPP
#define MXL_ORACLE_HPP

#include "mxl/hermitian.hpp"
#include "mxl/learners.hpp"
#include "mxl/mimo_model.hpp"
#include "mxl/random.hpp"
#include "mxl/waterfilling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mxl {

/// sum_k [P_k lambda_max(V_k) - tr(Q_k V_k)] for a given gradient.
inline double fw_gap(const std::vector<double>& powers, const CovarianceProfile& q,
                     const std::vector<HermitianMatrix>& v) {
  if (q.size() != v.size() || q.size() != powers.size()) throw std::invalid_argument("fw_gap: size mismatch");
  double gap = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) gap += powers[k] * max_eigenvalue(v[k]) - trace_product(q[k], v[k]);
  return std::max(gap, 0.0);
}

/// Frank-Wolfe gap of the sum rate; bounds R_max - R(Q) from above.
inline double fw_gap(const NetworkModel& model, const CovarianceProfile& q) {
  return fw_gap(model.powers(), q, gradient(model, q));
}

/// Sum rate of a single channel realization.
class StaticObjective {
 public:
  explicit StaticObjective(const NetworkModel& model) : model_(model) {}

  const NetworkModel& model() const { return model_; }
  double value(const CovarianceProfile& q) const { return sum_rate(model_, q); }
  std::vector<HermitianMatrix> gradient(const CovarianceProfile& q) const { return mxl::gradient(model_, q); }

 private:
  const NetworkModel& model_;
};

/// Sum rate averaged over a fixed pool of channel realizations sharing dims and powers.
class PooledObjective {
 public:
  explicit PooledObjective(std::vector<NetworkModel> pool) : pool_(std::move(pool)) {
    if (pool_.empty()) throw std::invalid_argument("PooledObjective: empty pool");
    for (const auto& m : pool_) {
      if (m.rx_antennas() != pool_[0].rx_antennas() || m.tx_antenna_counts() != pool_[0].tx_antenna_counts() ||
          m.powers() != pool_[0].powers()) {
        throw std::invalid_argument("PooledObjective: pool members differ in shape or powers");
      }
    }
  }

  const NetworkModel& model() const { return pool_.front(); }
  std::size_t size() const { return pool_.size(); }

  double value(const CovarianceProfile& q) const {
    double s = 0.0;
    for (const auto& m : pool_) s += sum_rate(m, q);
    return s / static_cast<double>(pool_.size());
  }

  std::vector<HermitianMatrix> gradient(const CovarianceProfile& q) const {
    auto acc = mxl::gradient(pool_[0], q);
    for (std::size_t i = 1; i < pool_.size(); ++i) {
      const auto v = mxl::gradient(pool_[i], q);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
    }
    for (auto& v : acc) v *= 1.0 / static_cast<double>(pool_.size());
    return acc;
  }

 private:
  std::vector<NetworkModel> pool_;
};

struct CapacitySolution {
  CovarianceProfile q;
  double rate = 0.0;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;
};

struct SolverOptions {
  double tol = 1e-8;
  long max_iterations = 200000;  // maximize_rate
  long mxl_stage = 500;          // MXL steps before the polish in solve_capacity
  long max_sweeps = 2000;        // round-robin polish sweeps in solve_capacity
};

/// Noiseless MXL with gamma_n = gamma_0 / sqrt(n), gamma_0 the one-step
/// optimal constant step for L^2 = sum_k P_k^2 |V_k(Q_0)|_F^2. Stops at
/// fw_gap <= tol; otherwise returns the iterate with the smallest gap seen.
template <class Objective>
CapacitySolution maximize_rate(const Objective& objective, SolverOptions opts = {}) {
  const NetworkModel& model = objective.model();
  MxlState state = mxl_init(model);
  auto v = objective.gradient(state.covariances);

  double l2 = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) l2 += std::pow(model.power(static_cast<Index>(k)), 2) * std::pow(v[k].norm(), 2);
  const double log_m = log_antenna_sum(model.tx_antenna_counts());

  CapacitySolution best;
  best.q = state.covariances;
  best.gap = fw_gap(model.powers(), state.covariances, v);
  if (best.gap <= opts.tol || log_m == 0.0 || !(l2 > 0.0)) {
    best.rate = objective.value(best.q);
    best.converged = best.gap <= opts.tol || log_m == 0.0 || !(l2 > 0.0);
    return best;
  }
  const double gamma0 = optimal_constant_step(std::sqrt(l2), model.tx_antenna_counts(), 1);
  for (long n = 1; n <= opts.max_iterations; ++n) {
    state = mxl_step(std::move(state), v, gamma0 / std::sqrt(static_cast<double>(n)));
    v = objective.gradient(state.covariances);
    const double gap = fw_gap(model.powers(), state.covariances, v);
    if (gap < best.gap) {
      best.q = state.covariances;
      best.gap = gap;
      best.iterations = n;
    }
    if (gap <= opts.tol) {
      best.converged = true;
      break;
    }
  }
  if (!best.converged) best.iterations = opts.max_iterations;
  best.rate = objective.value(best.q);
  return best;
}

namespace detail {

inline CapacitySolution polish_capacity(const NetworkModel& model, CapacitySolution best, const SolverOptions& opts) {
  CovarianceProfile q = best.q;
  for (long s = 0; s < opts.max_sweeps && !best.converged; ++s) {
    for (Index k = 0; k < model.users(); ++k) q = iwf_step(model, q, k);
    best.iterations += model.users();
    const double gap = fw_gap(model, q);
    if (gap < best.gap) {
      best.q = q;
      best.gap = gap;
    }
    best.converged = gap <= opts.tol;
  }
  best.rate = sum_rate(model, best.q);
  return best;
}

}  // namespace detail

/// R_max and Q* of a fixed channel. A noiseless MXL stage (at most
/// opts.mxl_stage steps) is followed by round-robin water-filling sweeps
/// from its best iterate until the Frank-Wolfe gap certifies opts.tol.
/// `iterations` counts MXL steps plus single-user updates.
inline CapacitySolution solve_capacity(const NetworkModel& model, SolverOptions opts = {}) {
  SolverOptions stage = opts;
  stage.max_iterations = std::min(opts.max_iterations, opts.mxl_stage);
  CapacitySolution best = maximize_rate(StaticObjective(model), stage);
  return detail::polish_capacity(model, std::move(best), opts);
}

/// Water-filling polish from a known profile, e.g. the optimum of a nearby channel.
inline CapacitySolution solve_capacity_from(const NetworkModel& model, const CovarianceProfile& start,
                                            SolverOptions opts = {}) {
  check_profile(model, start);
  CapacitySolution seed;
  seed.q = start;
  seed.gap = fw_gap(model, start);
  seed.converged = seed.gap <= opts.tol;
  return detail::polish_capacity(model, std::move(seed), opts);
}

/// Sample-average approximation of the ergodic sum capacity under i.i.d.
/// CN(0, 1) channel entries, using a fixed pool of `samples` draws.
inline CapacitySolution solve_ergodic_capacity(Rng& rng, Index rx, const std::vector<Index>& tx,
                                               const std::vector<double>& powers, int samples,
                                               SolverOptions opts = {}) {
  if (samples < 1) throw std::invalid_argument("solve_ergodic_capacity: need at least one sample");
  std::vector<NetworkModel> pool;
  pool.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) pool.push_back(draw_network(rng, rx, tx, powers));
  return maximize_rate(PooledObjective(std::move(pool)), opts);
}

}  // namespace mxl

#endif  // MXL_ORACLE_HPP
