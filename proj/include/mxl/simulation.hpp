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

#ifndef MXL_SIMULATION_HPP
#define MXL_SIMULATION_HPP

#include "mxl/estimation.hpp"
#include "mxl/learners.hpp"
#include "mxl/metrics.hpp"
#include "mxl/mimo_model.hpp"
#include "mxl/oracle.hpp"
#include "mxl/random.hpp"
#include "mxl/scenario.hpp"
#include "mxl/trace.hpp"
#include "mxl/waterfilling.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace mxl {

struct Simulation {
  Trace trace;
  NetworkModel model;                  // channel of the last iteration
  std::vector<Index> tx_antennas;
  CovarianceProfile final_profile;
  CovarianceProfile averaged_profile;  // sum_j w_j Q(j-1) / sum_j w_j
  CovarianceProfile optimum;           // Q* of the last channel, empty without oracle
};

namespace detail {

inline std::vector<Index> draw_antennas(const Scenario& s, Rng& rng) {
  if (!s.tx_antennas.list.empty()) return s.tx_antennas.list;
  std::vector<Index> m;
  for (Index k = 0; k < s.users; ++k)
    m.push_back(rng.uniform_int(static_cast<int>(s.tx_antennas.lo), static_cast<int>(s.tx_antennas.hi)));
  return m;
}

inline std::vector<double> expand_powers(const Scenario& s) {
  if (s.powers.size() == 1) return std::vector<double>(static_cast<std::size_t>(s.users), s.powers[0]);
  return s.powers;
}

inline NoiseModel make_noise(const Scenario& s) {
  switch (s.noise) {
    case NoiseModel::Kind::none:
      return NoiseModel::exact();
    case NoiseModel::Kind::synthetic:
      return NoiseModel::relative(s.noise_eta, s.noise_law);
    case NoiseModel::Kind::pipeline: {
      EstimatorConfig cfg;
      cfg.samples = s.samples;
      cfg.channel_error_std = s.channel_error_std;
      cfg.law = s.noise_law;
      return NoiseModel::sampled(cfg);
    }
  }
  return NoiseModel::exact();
}

inline StepSchedule make_schedule(const Scenario& s, double gamma) {
  switch (s.step) {
    case StepSchedule::Kind::constant:
      return StepSchedule::constant(gamma);
    case StepSchedule::Kind::power_law:
      return StepSchedule::power_law(gamma, s.step_exponent);
    case StepSchedule::Kind::adaptive_drop:
      return StepSchedule::adaptive_drop(gamma, s.step_rho);
  }
  return StepSchedule::constant(gamma);
}

/// Explicit step, or the guarantee-optimal one: over the whole budget for
/// constant/adaptive schedules, gamma_0 at n = 1 for power laws.
inline double resolve_gamma(const Scenario& s, double lipschitz, const std::vector<Index>& tx) {
  if (s.step_gamma) return *s.step_gamma;
  if (log_antenna_sum(tx) == 0.0 || !(lipschitz > 0.0)) return 1.0;
  const long horizon = s.step == StepSchedule::Kind::power_law ? 1 : std::max(1L, s.iterations);
  return optimal_constant_step(lipschitz, tx, horizon);
}

/// Channel sequence: fixed, Jakes-correlated, or redrawn i.i.d. per iteration.
class ChannelProcess {
 public:
  ChannelProcess(const Scenario& s, const std::vector<Index>& tx, const std::vector<double>& powers)
      : scenario_(s),
        tx_(tx),
        powers_(powers),
        rng_(s.topology_seed(), s.channel == ChannelMode::jakes ? Stream::fading : Stream::channel, 1),
        model_(initial(s, tx, powers)) {}

  const NetworkModel& model() const { return model_; }

  void advance() {
    switch (scenario_.channel) {
      case ChannelMode::fixed:
        break;
      case ChannelMode::jakes:
        jakes_ = jakes_advance(std::move(*jakes_), scenario_.update_period_s);
        model_ = model_.with_channels(jakes_->channels);
        break;
      case ChannelMode::iid:
        model_ = draw_network(rng_, scenario_.rx_antennas, tx_, powers_);
        break;
    }
  }

 private:
  NetworkModel initial(const Scenario& s, const std::vector<Index>& tx, const std::vector<double>& powers) {
    if (s.channel == ChannelMode::jakes) {
      jakes_ = make_jakes(rng_, s.rx_antennas, tx, s.velocity_mps, s.carrier_hz, s.oscillators);
      return NetworkModel(s.rx_antennas, jakes_->channels, powers);
    }
    if (s.channel == ChannelMode::iid) return draw_network(rng_, s.rx_antennas, tx, powers);
    Rng topo(s.topology_seed(), Stream::channel, 0);
    detail::draw_antennas(s, topo);  // keep the stream aligned with the antenna draw
    return draw_network(topo, s.rx_antennas, tx, powers);
  }

  const Scenario& scenario_;
  std::vector<Index> tx_;
  std::vector<double> powers_;
  Rng rng_;
  std::optional<JakesFadingState> jakes_;
  NetworkModel model_;
};

inline double lyapunov_value(const CovarianceProfile& optimum, const std::vector<HermitianMatrix>& scores,
                             const std::vector<double>& powers) {
  double d = 0.0;
  for (std::size_t k = 0; k < optimum.size(); ++k)
    d += powers[k] * fenchel_coupling(optimum[k] * (1.0 / powers[k]), scores[k]);
  return d;
}

}  // namespace detail

/// Runs one scenario end to end. The random streams (channel, fading,
/// noise, scheduler, init, estimator) are all derived from the scenario seed
/// (channels from channel_seed when set), so algorithms run with the same
/// seed see the same channels and the same noise draws.
inline Simulation simulate(const Scenario& s) {
  validate(s);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  Rng topo(s.topology_seed(), Stream::channel, 0);
  const std::vector<Index> tx = detail::draw_antennas(s, topo);
  const std::vector<double> powers = detail::expand_powers(s);
  detail::ChannelProcess channel(s, tx, powers);
  const NoiseModel noise = detail::make_noise(s);

  Rng noise_rng(s.seed, Stream::noise);
  Rng sched_rng(s.seed, Stream::scheduler);
  Rng init_rng(s.seed, Stream::init);
  Rng prepass_rng(s.seed, Stream::estimator);

  const bool learner = s.algorithm == Algorithm::mxl || s.algorithm == Algorithm::mxl_async ||
                       s.algorithm == Algorithm::mxl_eig;
  const NetworkModel& m0 = channel.model();
  const CovarianceProfile q0 = uniform_profile(m0);

  Trace trace;
  trace.scenario = serialize(s);
  trace.lipschitz = lipschitz_estimate(m0, q0, noise, prepass_rng, s.lipschitz_draws);
  const double gamma0 = detail::resolve_gamma(s, trace.lipschitz, tx);
  trace.gamma0 = learner ? gamma0 : nan;
  StepSchedule schedule = detail::make_schedule(s, gamma0);

  // Learner state.
  MxlState mxl_state;
  AmxlState async_state;
  EigenState eig_state;
  CovarianceProfile q = q0;
  std::vector<HermitianMatrix> scores;
  switch (s.algorithm) {
    case Algorithm::mxl:
      mxl_state = mxl_init(m0);
      break;
    case Algorithm::mxl_async: {
      auto sched = AsyncScheduler::make(s.kernel, s.users, s.max_delay);
      sched.stickiness = s.stickiness;
      sched.rate = s.bernoulli_rate;
      async_state = amxl_init(m0, sched);
      break;
    }
    case Algorithm::mxl_eig:
      eig_state = exl_init(m0, init_rng);
      q = eig_state.covariances();
      break;
    case Algorithm::iwf:
    case Algorithm::swf:
      break;
  }
  auto current_scores = [&]() -> std::vector<HermitianMatrix> {
    switch (s.algorithm) {
      case Algorithm::mxl:
        return mxl_state.scores;
      case Algorithm::mxl_async:
        return async_state.learner.scores;
      case Algorithm::mxl_eig: {
        std::vector<HermitianMatrix> y;
        for (std::size_t k = 0; k < eig_state.eigenvalues.size(); ++k) y.push_back(eig_state.score(k));
        return y;
      }
      default:
        return {};
    }
  };

  // Oracle.
  const bool tracked_oracle = s.oracle && s.channel != ChannelMode::iid;
  CovarianceProfile optimum;
  double rate_max = nan;
  auto refresh_oracle = [&](const NetworkModel& m) {
    if (!tracked_oracle) return;
    const auto sol = optimum.empty() ? solve_capacity(m) : solve_capacity_from(m, optimum);
    optimum = sol.q;
    rate_max = sol.rate;
  };
  refresh_oracle(m0);
  const double rate_uniform0 = sum_rate(m0, q0);
  trace.rate_max = s.channel == ChannelMode::fixed ? rate_max : nan;
  trace.rate_uniform = rate_uniform0;

  const auto start = std::chrono::steady_clock::now();
  WeightedAverage average;
  CovarianceProfile averaged;
  double averaged_weight = 0.0;
  double rate_uniform = rate_uniform0;

  auto record = [&](long n, double rate) {
    const NetworkModel& m = channel.model();
    TraceRecord r;
    r.n = n;
    r.rate = rate;
    r.average_rate = n == 0 ? rate : average.value();
    r.rate_uniform = rate_uniform;
    r.throughput = normalized_throughput(rate, rate_uniform);
    r.fw_gap = s.channel == ChannelMode::iid ? nan : fw_gap(m, q);
    r.fenchel = learner && !optimum.empty() ? detail::lyapunov_value(optimum, current_scores(), powers) : nan;
    r.wall_ms = s.record_wall_time
                    ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                    : 0.0;
    r.rate_max = rate_max;
    trace.records.push_back(r);
  };

  double prev_rate = sum_rate(m0, q);
  record(0, prev_rate);

  for (long n = 1; n <= s.iterations; ++n) {
    channel.advance();
    const NetworkModel& m = channel.model();
    if (s.channel != ChannelMode::fixed) {
      rate_uniform = sum_rate(m, uniform_profile(m));
      refresh_oracle(m);
    }

    double weight = 1.0;
    switch (s.algorithm) {
      case Algorithm::mxl: {
        weight = schedule(n);
        const auto v = estimate_gradients(m, q, noise, noise_rng);
        mxl_state = mxl_step(std::move(mxl_state), v, weight);
        break;
      }
      case Algorithm::mxl_async:
        weight = schedule(n);
        async_state = amxl_step(std::move(async_state), m, schedule, noise, sched_rng, noise_rng);
        break;
      case Algorithm::mxl_eig: {
        const auto v = estimate_gradients(m, q, noise, noise_rng);
        auto r = exl_step_with_backoff(eig_state, v, schedule(n));
        weight = r.gamma_used;
        eig_state = std::move(r.state);
        break;
      }
      case Algorithm::iwf: {
        const Index k = (n - 1) % s.users;
        const auto v = estimate_gradients(m, q, noise, noise_rng);
        q = noise.kind == NoiseModel::Kind::none ? iwf_step(m, std::move(q), k)
                                                 : iwf_step_feedback(m, std::move(q), k, v[static_cast<std::size_t>(k)]);
        break;
      }
      case Algorithm::swf: {
        const auto v = estimate_gradients(m, q, noise, noise_rng);
        q = noise.kind == NoiseModel::Kind::none ? swf_step(m, q) : swf_step_feedback(m, q, v);
        break;
      }
    }

    // The j-th weight goes with the iterate the j-th feedback was measured at.
    average.add(weight, prev_rate);
    if (averaged.empty()) {
      for (const auto& qk : q) averaged.push_back(qk * weight);
    } else {
      for (std::size_t k = 0; k < q.size(); ++k) averaged[k] += q[k] * weight;
    }
    averaged_weight += weight;

    switch (s.algorithm) {
      case Algorithm::mxl:
        q = mxl_state.covariances;
        break;
      case Algorithm::mxl_async:
        q = async_state.learner.covariances;
        break;
      case Algorithm::mxl_eig:
        q = eig_state.covariances();
        break;
      default:
        break;
    }
    const double rate = sum_rate(m, q);
    schedule.observe(rate);
    record(n, rate);
    prev_rate = rate;
    if (s.stop_gap > 0.0 && trace.records.back().fw_gap <= s.stop_gap) break;
  }

  Simulation out{std::move(trace), channel.model(), tx, q, {}, optimum};
  if (averaged.empty()) {
    out.averaged_profile = q;
  } else {
    for (auto& a : averaged) a *= 1.0 / averaged_weight;
    out.averaged_profile = std::move(averaged);
  }
  return out;
}

inline Trace run_scenario(const Scenario& s) { return simulate(s).trace; }

}  // namespace mxl

#endif  // MXL_SIMULATION_HPP
