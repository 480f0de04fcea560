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

#ifndef MXL_MIMO_MODEL_HPP
#define MXL_MIMO_MODEL_HPP

#include "mxl/hermitian.hpp"
#include "mxl/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mxl {

/// One covariance matrix per user, Q_k of size M_k.
using CovarianceProfile = std::vector<HermitianMatrix>;

/// Gaussian vector multiple-access channel: K users with M_k antennas and
/// power budget P_k transmitting to one N-antenna receiver with unit noise.
class NetworkModel {
 public:
  NetworkModel(Index rx_antennas, std::vector<Matrix> channels, std::vector<double> powers)
      : rx_(rx_antennas), channels_(std::move(channels)), powers_(std::move(powers)) {
    if (rx_ < 1) throw std::invalid_argument("NetworkModel: need at least one receive antenna");
    if (channels_.empty()) throw std::invalid_argument("NetworkModel: need at least one user");
    if (powers_.size() != channels_.size()) {
      throw std::invalid_argument("NetworkModel: " + std::to_string(powers_.size()) + " powers for " +
                                  std::to_string(channels_.size()) + " users");
    }
    for (std::size_t k = 0; k < channels_.size(); ++k) check_user(k, channels_[k], powers_[k]);
  }

  Index users() const { return static_cast<Index>(channels_.size()); }
  Index rx_antennas() const { return rx_; }
  Index tx_antennas(Index k) const { return channels_.at(static_cast<std::size_t>(k)).cols(); }
  double power(Index k) const { return powers_.at(static_cast<std::size_t>(k)); }
  const Matrix& channel(Index k) const { return channels_.at(static_cast<std::size_t>(k)); }
  const std::vector<Matrix>& channels() const { return channels_; }
  const std::vector<double>& powers() const { return powers_; }

  std::vector<Index> tx_antenna_counts() const {
    std::vector<Index> m;
    for (const auto& h : channels_) m.push_back(h.cols());
    return m;
  }

  /// Same users and powers, new channel realization (fading).
  NetworkModel with_channels(std::vector<Matrix> channels) const {
    if (channels.size() != channels_.size()) throw std::invalid_argument("with_channels: user count changed");
    for (std::size_t k = 0; k < channels.size(); ++k) {
      if (channels[k].rows() != channels_[k].rows() || channels[k].cols() != channels_[k].cols()) {
        throw std::invalid_argument("with_channels: channel shape changed for user " + std::to_string(k));
      }
    }
    return NetworkModel(rx_, std::move(channels), powers_);
  }

 private:
  void check_user(std::size_t k, const Matrix& h, double p) const {
    const std::string who = "NetworkModel: user " + std::to_string(k);
    if (h.rows() != rx_) throw std::invalid_argument(who + " channel has wrong row count");
    if (h.cols() < 1) throw std::invalid_argument(who + " has no transmit antennas");
    if (!h.allFinite()) throw std::invalid_argument(who + " channel is not finite");
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument(who + " power must be positive");
  }

  Index rx_;
  std::vector<Matrix> channels_;
  std::vector<double> powers_;
};

inline void check_profile(const NetworkModel& model, const CovarianceProfile& q) {
  if (static_cast<Index>(q.size()) != model.users()) {
    throw std::invalid_argument("profile has " + std::to_string(q.size()) + " users, model has " +
                                std::to_string(model.users()));
  }
  for (Index k = 0; k < model.users(); ++k) {
    if (q[static_cast<std::size_t>(k)].dim() != model.tx_antennas(k)) {
      throw std::invalid_argument("profile: covariance of user " + std::to_string(k) + " has wrong size");
    }
  }
}

inline void check_user_index(const NetworkModel& model, Index k) {
  if (k < 0 || k >= model.users()) throw std::out_of_range("user index " + std::to_string(k) + " out of range");
}

/// Q_k = (P_k / M_k) I for every user.
inline CovarianceProfile uniform_profile(const NetworkModel& model) {
  CovarianceProfile q;
  for (Index k = 0; k < model.users(); ++k) {
    q.push_back(HermitianMatrix::identity(model.tx_antennas(k)) *
                (model.power(k) / static_cast<double>(model.tx_antennas(k))));
  }
  return q;
}

inline CovarianceProfile zero_profile(const NetworkModel& model) {
  CovarianceProfile q;
  for (Index k = 0; k < model.users(); ++k) q.push_back(HermitianMatrix::zero(model.tx_antennas(k)));
  return q;
}

/// Worst violation of Q_k >= 0 and tr Q_k = P_k, each relative to P_k.
struct FeasibilityResidual {
  double psd = 0.0;    // max over k of max(0, -lambda_min(Q_k)) / P_k
  double trace = 0.0;  // max over k of |tr Q_k - P_k| / P_k
};

inline FeasibilityResidual feasibility_residual(const NetworkModel& model, const CovarianceProfile& q) {
  check_profile(model, q);
  FeasibilityResidual r;
  for (Index k = 0; k < model.users(); ++k) {
    const auto& qk = q[static_cast<std::size_t>(k)];
    const double p = model.power(k);
    r.psd = std::max(r.psd, std::max(0.0, -min_eigenvalue(qk)) / p);
    r.trace = std::max(r.trace, std::abs(qk.trace() - p) / p);
  }
  return r;
}

inline bool is_feasible(const NetworkModel& model, const CovarianceProfile& q, double psd_tol = 1e-10,
                        double trace_tol = 1e-8) {
  const auto r = feasibility_residual(model, q);
  return r.psd <= psd_tol && r.trace <= trace_tol;
}

inline HermitianMatrix received_contribution(const NetworkModel& model, const CovarianceProfile& q, Index k) {
  const Matrix& h = model.channel(k);
  return HermitianMatrix(Matrix(h * q[static_cast<std::size_t>(k)].matrix() * h.adjoint()));
}

/// W = I + sum_l H_l Q_l H_l^H.
inline HermitianMatrix aggregate_covariance(const NetworkModel& model, const CovarianceProfile& q) {
  check_profile(model, q);
  HermitianMatrix w = HermitianMatrix::identity(model.rx_antennas());
  for (Index k = 0; k < model.users(); ++k) w += received_contribution(model, q, k);
  return w;
}

/// W_{-k} = W - H_k Q_k H_k^H, the interference-plus-noise covariance seen by user k.
inline HermitianMatrix mui_covariance(const NetworkModel& model, const CovarianceProfile& q, Index k) {
  check_user_index(model, k);
  return aggregate_covariance(model, q) - received_contribution(model, q, k);
}

inline double sum_rate(const NetworkModel& model, const CovarianceProfile& q) {
  return log_det(aggregate_covariance(model, q));
}

/// Rate of user k in nats when decoded against all other users as noise.
inline double user_rate(const NetworkModel& model, const CovarianceProfile& q, Index k) {
  const HermitianMatrix w_minus = mui_covariance(model, q, k);
  return log_det(w_minus + received_contribution(model, q, k)) - log_det(w_minus);
}

/// V_k = H_k^H W^{-1} H_k, the derivative of the sum rate in Q_k.
inline std::vector<HermitianMatrix> gradient(const NetworkModel& model, const CovarianceProfile& q) {
  const HermitianMatrix w = aggregate_covariance(model, q);
  Eigen::LLT<Matrix> llt(w.matrix());
  if (llt.info() != Eigen::Success) throw std::domain_error("gradient: aggregate covariance is not positive definite");
  std::vector<HermitianMatrix> v;
  v.reserve(q.size());
  for (Index k = 0; k < model.users(); ++k) {
    const Matrix x = llt.matrixL().solve(model.channel(k));
    v.emplace_back(Matrix(x.adjoint() * x));
  }
  return v;
}

/// |[R_k(Q_k) - R_k(Q_k')] - [R(Q_k) - R(Q_k')]| with everyone else fixed.
inline double potential_residual(const NetworkModel& model, const CovarianceProfile& q, Index k,
                                 const HermitianMatrix& qk_alt) {
  check_user_index(model, k);
  CovarianceProfile alt = q;
  alt[static_cast<std::size_t>(k)] = qk_alt;
  const double user_diff = user_rate(model, q, k) - user_rate(model, alt, k);
  const double sum_diff = sum_rate(model, q) - sum_rate(model, alt);
  return std::abs(user_diff - sum_diff);
}

/// I.i.d. CN(0, scale^2) entries.
inline Matrix sample_static_channel(Rng& rng, Index rx, Index tx, double scale = 1.0) {
  if (rx < 1 || tx < 1) throw std::invalid_argument("sample_static_channel: dimensions must be positive");
  if (scale == 0.0) return Matrix::Zero(rx, tx);
  return rng.complex_normal_matrix(rx, tx, scale * scale);
}

inline NetworkModel draw_network(Rng& rng, Index rx, const std::vector<Index>& tx, const std::vector<double>& powers,
                                 double scale = 1.0) {
  std::vector<Matrix> h;
  for (Index m : tx) h.push_back(sample_static_channel(rng, rx, m, scale));
  return NetworkModel(rx, std::move(h), powers);
}

// ---------------------------------------------------------------------------
// Jakes fading: every channel entry is an independent sum of sinusoids,
//   h(t) = Ns^{-1/2} sum_n exp(j (2 pi f_D t cos(a_n) + phi_n)),
// with arrival angles a_n = 2 pi (n + theta) / Ns (random rotation theta per
// entry) and uniform phases phi_n. Unit power, autocorrelation J0(2 pi f_D tau).

inline constexpr double kSpeedOfLight = 2.998e8;

inline double doppler_frequency(double velocity_mps, double carrier_hz) {
  return velocity_mps * carrier_hz / kSpeedOfLight;
}

struct JakesFadingState {
  double carrier_hz = 0.0;
  double velocity_mps = 0.0;
  double doppler_hz = 0.0;
  double time_s = 0.0;
  int oscillators = 0;
  Index rx = 0;
  std::vector<Index> tx;
  // Per user, per entry (column-major), per oscillator.
  std::vector<std::vector<double>> direction_cos;
  std::vector<std::vector<double>> phase;
  std::vector<Matrix> channels;
};

namespace detail {

inline void evaluate_jakes(JakesFadingState& s) {
  const double w = 2.0 * std::numbers::pi * s.doppler_hz * s.time_s;
  const double norm = 1.0 / std::sqrt(static_cast<double>(s.oscillators));
  const auto ns = static_cast<std::size_t>(s.oscillators);
  for (std::size_t k = 0; k < s.tx.size(); ++k) {
    Matrix& h = s.channels[k];
    const auto& dc = s.direction_cos[k];
    const auto& ph = s.phase[k];
    for (Index e = 0; e < h.size(); ++e) {
      Complex acc = 0.0;
      const std::size_t base = static_cast<std::size_t>(e) * ns;
      for (std::size_t n = 0; n < ns; ++n) acc += std::polar(1.0, w * dc[base + n] + ph[base + n]);
      h.data()[e] = norm * acc;
    }
  }
}

}  // namespace detail

inline JakesFadingState make_jakes(Rng& rng, Index rx, const std::vector<Index>& tx, double velocity_mps,
                                   double carrier_hz, int oscillators = 16) {
  if (oscillators < 16) throw std::invalid_argument("make_jakes: need at least 16 oscillators");
  if (velocity_mps < 0.0 || !(carrier_hz > 0.0)) throw std::invalid_argument("make_jakes: bad velocity/carrier");
  JakesFadingState s;
  s.carrier_hz = carrier_hz;
  s.velocity_mps = velocity_mps;
  s.doppler_hz = doppler_frequency(velocity_mps, carrier_hz);
  s.oscillators = oscillators;
  s.rx = rx;
  s.tx = tx;
  const double two_pi = 2.0 * std::numbers::pi;
  for (Index m : tx) {
    const auto entries = static_cast<std::size_t>(rx * m);
    std::vector<double> dc(entries * static_cast<std::size_t>(oscillators));
    std::vector<double> ph(dc.size());
    for (std::size_t e = 0; e < entries; ++e) {
      const double theta = rng.uniform();
      for (int n = 0; n < oscillators; ++n) {
        const std::size_t i = e * static_cast<std::size_t>(oscillators) + static_cast<std::size_t>(n);
        dc[i] = std::cos(two_pi * (n + theta) / oscillators);
        ph[i] = rng.uniform(0.0, two_pi);
      }
    }
    s.direction_cos.push_back(std::move(dc));
    s.phase.push_back(std::move(ph));
    s.channels.emplace_back(Matrix::Zero(rx, m));
  }
  detail::evaluate_jakes(s);
  return s;
}

inline JakesFadingState jakes_advance(JakesFadingState state, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("jakes_advance: dt must be nonnegative");
  if (dt == 0.0) return state;
  state.time_s += dt;
  detail::evaluate_jakes(state);
  return state;
}

}  // namespace mxl

#endif  // MXL_MIMO_MODEL_HPP
