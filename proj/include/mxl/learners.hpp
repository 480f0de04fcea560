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

#ifndef MXL_LEARNERS_HPP
#define MXL_LEARNERS_HPP

#include "mxl/estimation.hpp"
#include "mxl/hermitian.hpp"
#include "mxl/mimo_model.hpp"
#include "mxl/random.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mxl {

// ---------------------------------------------------------------------------
// Step sizes

class StepSchedule {
 public:
  enum class Kind { constant, power_law, adaptive_drop };

  static StepSchedule constant(double gamma) { return StepSchedule(Kind::constant, gamma, 0.0, 1.0); }

  /// gamma / n^exponent, exponent in (0, 1].
  static StepSchedule power_law(double gamma, double exponent) {
    if (!(exponent > 0.0 && exponent <= 1.0)) throw std::invalid_argument("power_law: exponent must be in (0, 1]");
    return StepSchedule(Kind::power_law, gamma, exponent, 1.0);
  }

  /// Constant gamma until the sum rate oscillates, then gamma * rho for good.
  static StepSchedule adaptive_drop(double gamma, double rho = 0.1) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("adaptive_drop: rho must be in (0, 1)");
    return StepSchedule(Kind::adaptive_drop, gamma, 0.0, rho);
  }

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double exponent() const { return exponent_; }
  double rho() const { return rho_; }
  bool dropped() const { return dropped_; }

  /// Step for the n-th update, n >= 1.
  double operator()(long n) const {
    if (n < 1) throw std::invalid_argument("StepSchedule: iteration index starts at 1");
    switch (kind_) {
      case Kind::constant:
        return gamma_;
      case Kind::power_law:
        return gamma_ / std::pow(static_cast<double>(n), exponent_);
      case Kind::adaptive_drop:
        return dropped_ ? gamma_ * rho_ : gamma_;
    }
    return gamma_;
  }

  /// Feed the latest sum rate to the oscillation detector: the step drops once
  /// the rate has decreased in 3 of the last 5 iterations.
  void observe(double rate) {
    if (kind_ != Kind::adaptive_drop || dropped_) return;
    recent_.push_back(rate);
    if (recent_.size() > 6) recent_.pop_front();
    if (recent_.size() < 6) return;
    int decreases = 0;
    for (std::size_t i = 1; i < recent_.size(); ++i)
      if (recent_[i] < recent_[i - 1]) ++decreases;
    if (decreases >= 3) dropped_ = true;
  }

  /// sum gamma_n^2 < sum gamma_n = infinity.
  bool square_summable() const { return kind_ == Kind::power_law && exponent_ > 0.5; }

 private:
  StepSchedule(Kind kind, double gamma, double exponent, double rho)
      : kind_(kind), gamma_(gamma), exponent_(exponent), rho_(rho) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("StepSchedule: gamma must be positive");
  }

  Kind kind_;
  double gamma_;
  double exponent_;
  double rho_;
  bool dropped_ = false;
  std::deque<double> recent_;
};

inline double step_size(const StepSchedule& schedule, long n) { return schedule(n); }

inline double log_antenna_sum(const std::vector<Index>& tx_antennas) {
  double s = 0.0;
  for (Index m : tx_antennas) {
    if (m < 1) throw std::invalid_argument("antenna counts must be positive");
    s += std::log(static_cast<double>(m));
  }
  return s;
}

/// Constant step minimizing the n-step mean guarantee: L^{-1} sqrt(2 sum_k log M_k / n).
inline double optimal_constant_step(double lipschitz, const std::vector<Index>& tx_antennas, long n) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("optimal_constant_step: L must be positive");
  if (n < 1) throw std::invalid_argument("optimal_constant_step: horizon must be positive");
  return std::sqrt(2.0 * log_antenna_sum(tx_antennas) / static_cast<double>(n)) / lipschitz;
}

/// The guarantee attained by optimal_constant_step: L sqrt(2 sum_k log M_k / n).
inline double optimal_constant_guarantee(double lipschitz, const std::vector<Index>& tx_antennas, long n) {
  if (n < 1) throw std::invalid_argument("optimal_constant_guarantee: horizon must be positive");
  return lipschitz * std::sqrt(2.0 * log_antenna_sum(tx_antennas) / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Synchronous matrix exponential learning

struct MxlState {
  std::vector<HermitianMatrix> scores;  // Y_k
  CovarianceProfile covariances;        // Q_k = exp_map(Y_k, P_k)
  std::vector<double> powers;
  long iteration = 0;
};

/// Y_k = 0, Q_k = (P_k / M_k) I.
inline MxlState mxl_init(const NetworkModel& model) {
  MxlState s;
  for (Index k = 0; k < model.users(); ++k) {
    s.scores.push_back(HermitianMatrix::zero(model.tx_antennas(k)));
    s.covariances.push_back(exp_map(s.scores.back(), model.power(k)));
    s.powers.push_back(model.power(k));
  }
  return s;
}

namespace detail {

inline void check_feedback(const MxlState& s, std::size_t k, const HermitianMatrix& v) {
  if (v.dim() != s.scores[k].dim()) {
    throw std::invalid_argument("gradient feedback for user " + std::to_string(k) + " has wrong size");
  }
  if (!v.all_finite()) throw std::invalid_argument("gradient feedback for user " + std::to_string(k) + " is not finite");
}

inline void score_update(MxlState& s, std::size_t k, const HermitianMatrix& v, double gamma) {
  s.scores[k] += v * gamma;
  s.covariances[k] = exp_map(s.scores[k], s.powers[k]);
}

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("step size must be finite and nonnegative");
}

}  // namespace detail

/// Y_k += gamma V_hat_k; Q_k = P_k exp(Y_k) / tr exp(Y_k) for every user.
inline MxlState mxl_step(MxlState state, const std::vector<HermitianMatrix>& v_hat, double gamma) {
  detail::check_gamma(gamma);
  if (v_hat.size() != state.scores.size()) throw std::invalid_argument("mxl_step: one gradient per user expected");
  for (std::size_t k = 0; k < v_hat.size(); ++k) detail::check_feedback(state, k, v_hat[k]);
  for (std::size_t k = 0; k < v_hat.size(); ++k) detail::score_update(state, k, v_hat[k], gamma);
  ++state.iteration;
  return state;
}

// ---------------------------------------------------------------------------
// Asynchronous updates with bounded delays

enum class UpdateKernel {
  all_users,       // every user updates at every event
  uniform_single,  // one user per event, uniformly at random
  sticky_single,   // one user per event; repeats the previous one w.p. stickiness, else uniform
  bernoulli,       // each user independently w.p. rate, redrawn until nonempty
};

/// Homogeneous Markov chain over update sets K_n plus per-user delay processes.
struct AsyncScheduler {
  UpdateKernel kernel = UpdateKernel::all_users;
  Index users = 1;
  int max_delay = 0;        // D
  double stickiness = 0.5;  // sticky_single
  double rate = 0.5;        // bernoulli
  std::vector<long> update_counts;  // n_k
  Index last_user = -1;
  long events = 0;

  static AsyncScheduler make(UpdateKernel kernel, Index users, int max_delay) {
    if (users < 1) throw std::invalid_argument("AsyncScheduler: need at least one user");
    if (max_delay < 0) throw std::invalid_argument("AsyncScheduler: delay bound must be nonnegative");
    AsyncScheduler s;
    s.kernel = kernel;
    s.users = users;
    s.max_delay = max_delay;
    s.update_counts.assign(static_cast<std::size_t>(users), 0);
    return s;
  }
};

struct ScheduleDraw {
  std::vector<bool> updating;  // k in K_n
  std::vector<int> delays;     // d_k(n) in [0, D]
};

inline ScheduleDraw scheduler_next(AsyncScheduler& sched, Rng& rng) {
  const auto k_count = static_cast<std::size_t>(sched.users);
  ScheduleDraw d;
  d.updating.assign(k_count, false);
  switch (sched.kernel) {
    case UpdateKernel::all_users:
      d.updating.assign(k_count, true);
      break;
    case UpdateKernel::uniform_single:
      d.updating[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(sched.users) - 1))] = true;
      break;
    case UpdateKernel::sticky_single: {
      Index k = sched.last_user;
      if (k < 0 || rng.uniform() >= sched.stickiness) k = rng.uniform_int(0, static_cast<int>(sched.users) - 1);
      d.updating[static_cast<std::size_t>(k)] = true;
      break;
    }
    case UpdateKernel::bernoulli: {
      bool any = false;
      while (!any) {
        for (std::size_t k = 0; k < k_count; ++k) {
          d.updating[k] = rng.uniform() < sched.rate;
          any = any || d.updating[k];
        }
      }
      break;
    }
  }
  d.delays.assign(k_count, 0);
  if (sched.max_delay > 0)
    for (auto& x : d.delays) x = rng.uniform_int(0, sched.max_delay);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (d.updating[k]) {
      ++sched.update_counts[k];
      sched.last_user = static_cast<Index>(k);
    }
  }
  ++sched.events;
  return d;
}

struct AmxlState {
  MxlState learner;
  AsyncScheduler scheduler;
  std::deque<CovarianceProfile> history;  // history[d] = Q(n - d), d = 0..D
};

inline AmxlState amxl_init(const NetworkModel& model, AsyncScheduler scheduler) {
  if (scheduler.users != model.users()) throw std::invalid_argument("amxl_init: scheduler user count mismatch");
  AmxlState s{mxl_init(model), std::move(scheduler), {}};
  s.history.assign(static_cast<std::size_t>(s.scheduler.max_delay) + 1, s.learner.covariances);
  return s;
}

/// One update event. Users in K_n step with gamma_{n_k} on feedback computed
/// at the stale profile Q_l(n - d_l(n)) for every l (including themselves);
/// everyone else is left untouched.
inline AmxlState amxl_step(AmxlState state, const NetworkModel& model, const StepSchedule& schedule,
                           const NoiseModel& noise, Rng& scheduler_rng, Rng& noise_rng) {
  const ScheduleDraw draw = scheduler_next(state.scheduler, scheduler_rng);
  CovarianceProfile stale;
  for (std::size_t l = 0; l < draw.delays.size(); ++l) {
    const auto d = static_cast<std::size_t>(draw.delays[l]);
    if (d >= state.history.size()) {
      throw std::out_of_range("amxl_step: delay " + std::to_string(d) + " exceeds the profile buffer");
    }
    stale.push_back(state.history[d][l]);
  }
  const auto v_hat = estimate_gradients(model, stale, noise, noise_rng, draw.updating);
  for (std::size_t k = 0; k < draw.updating.size(); ++k) {
    if (!draw.updating[k]) continue;
    detail::check_feedback(state.learner, k, v_hat[k]);
    detail::score_update(state.learner, k, v_hat[k], schedule(state.scheduler.update_counts[k]));
  }
  ++state.learner.iteration;
  state.history.push_front(state.learner.covariances);
  state.history.pop_back();
  return state;
}

// ---------------------------------------------------------------------------
// Eigen-based exponential learning

/// Per user: eigenvalues q_k (summing to P_k) and eigenvectors U_k (columns).
struct EigenState {
  std::vector<RVector> eigenvalues;
  std::vector<Matrix> eigenvectors;
  std::vector<double> powers;
  long iteration = 0;

  HermitianMatrix covariance(std::size_t k) const {
    const Matrix& u = eigenvectors[k];
    return HermitianMatrix(Matrix(u * eigenvalues[k].asDiagonal() * u.adjoint()));
  }

  CovarianceProfile covariances() const {
    CovarianceProfile q;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) q.push_back(covariance(k));
    return q;
  }

  /// Score matrix whose exp_map reproduces Q_k: U diag(log q) U^H, with
  /// zero eigenvalues floored at the smallest normal double.
  HermitianMatrix score(std::size_t k) const {
    const Matrix& u = eigenvectors[k];
    const RVector l = eigenvalues[k].array().max(std::numeric_limits<double>::min()).log();
    return HermitianMatrix(Matrix(u * l.asDiagonal() * u.adjoint()));
  }
};

class ExlStepRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform power with relative jitter on q and a Haar-random eigenbasis.
/// Exactly equal eigenvalues would make every eigenvector coupling degenerate.
inline EigenState exl_init(const NetworkModel& model, Rng& rng, double jitter = 1e-6) {
  EigenState s;
  for (Index k = 0; k < model.users(); ++k) {
    const Index m = model.tx_antennas(k);
    RVector q(m);
    for (Index a = 0; a < m; ++a) q(a) = 1.0 + jitter * rng.uniform(-1.0, 1.0);
    q *= model.power(k) / q.sum();
    s.eigenvalues.push_back(q);
    s.eigenvectors.push_back(random_unitary(rng, m));
    s.powers.push_back(model.power(k));
  }
  return s;
}

/// Eigenvalue couplings closer than this in log-ratio are skipped.
inline constexpr double kDegenerateLogGap = 1e-8;

/// One explicit Euler step of the eigen-dynamics followed by Gram-Schmidt on
/// U_k and exact renormalization of q_k. Throws ExlStepRejected if any
/// eigenvalue would become negative; the state is then unchanged.
inline EigenState exl_step(EigenState state, const std::vector<HermitianMatrix>& v, double gamma) {
  detail::check_gamma(gamma);
  if (v.size() != state.eigenvalues.size()) throw std::invalid_argument("exl_step: one gradient per user expected");
  std::vector<RVector> new_q(v.size());
  std::vector<Matrix> new_u(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const RVector& q = state.eigenvalues[k];
    const Matrix& u = state.eigenvectors[k];
    const Index m = q.size();
    if (v[k].dim() != m) throw std::invalid_argument("exl_step: gradient of user " + std::to_string(k) + " has wrong size");
    if (!v[k].all_finite()) throw std::invalid_argument("exl_step: gradient is not finite");
    const Matrix vt = u.adjoint() * v[k].matrix() * u;  // V_{ab} = u_a^H V u_b
    const double p = state.powers[k];
    double mean = 0.0;
    for (Index b = 0; b < m; ++b) mean += q(b) * vt(b, b).real();
    mean /= p;

    RVector q_next(m);
    for (Index a = 0; a < m; ++a) q_next(a) = q(a) + gamma * q(a) * (vt(a, a).real() - mean);
    if (q_next.minCoeff() < 0.0) {
      throw ExlStepRejected("exl_step: step " + std::to_string(gamma) + " drives an eigenvalue of user " +
                            std::to_string(k) + " negative");
    }

    // u_a += gamma sum_{b != a} V_{ba} / (log q_a - log q_b) u_b, i.e. U <- U (I + gamma C).
    Matrix c = Matrix::Zero(m, m);
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) {
        if (a == b || q(a) <= 0.0 || q(b) <= 0.0) continue;
        const double gap = std::log(q(a)) - std::log(q(b));
        if (std::abs(gap) < kDegenerateLogGap) continue;
        c(b, a) = vt(b, a) / gap;
      }
    }
    new_u[k] = orthonormalize(u + gamma * (u * c));
    new_q[k] = q_next * (p / q_next.sum());
  }
  state.eigenvalues = std::move(new_q);
  state.eigenvectors = std::move(new_u);
  ++state.iteration;
  return state;
}

struct ExlBackoffResult {
  EigenState state;
  double gamma_used = 0.0;
  int halvings = 0;
};

/// exl_step, halving gamma until the step is accepted.
inline ExlBackoffResult exl_step_with_backoff(const EigenState& state, const std::vector<HermitianMatrix>& v,
                                              double gamma, int max_halvings = 40) {
  for (int h = 0; h <= max_halvings; ++h) {
    try {
      return {exl_step(state, v, gamma), gamma, h};
    } catch (const ExlStepRejected&) {
      gamma *= 0.5;
    }
  }
  throw ExlStepRejected("exl_step_with_backoff: no acceptable step size found");
}

}  // namespace mxl

#endif  // MXL_LEARNERS_HPP
