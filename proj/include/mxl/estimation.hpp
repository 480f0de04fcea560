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

#ifndef MXL_ESTIMATION_HPP
#define MXL_ESTIMATION_HPP

#include "mxl/hermitian.hpp"
#include "mxl/mimo_model.hpp"
#include "mxl/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mxl {

enum class NoiseLaw {
  gaussian_symmetric,  // unbounded, symmetric
  bounded_uniform,     // bounded support, symmetric
};

/// Receiver-side signal sampling and transmitter-side channel measurement.
struct EstimatorConfig {
  int samples = 64;               // S, used for both signals and channel measurements
  double channel_error_std = 0.0; // per-entry std of the additive measurement error on H_k
  NoiseLaw law = NoiseLaw::gaussian_symmetric;

  void validate(Index rx_antennas) const {
    if (samples < 2) throw std::invalid_argument("EstimatorConfig: need at least 2 samples");
    if (samples <= rx_antennas + 1) {
      throw std::invalid_argument("EstimatorConfig: " + std::to_string(samples) + " samples do not exceed N + 1 = " +
                                  std::to_string(rx_antennas + 1));
    }
    if (!(channel_error_std >= 0.0)) throw std::invalid_argument("EstimatorConfig: negative channel error");
  }
};

/// S i.i.d. received vectors y = sum_k H_k x_k + z, x_k ~ CN(0, Q_k), z ~ CN(0, I).
inline std::vector<CVector> sample_signals(const NetworkModel& model, const CovarianceProfile& q, Rng& rng,
                                           int samples) {
  check_profile(model, q);
  if (samples < 1) throw std::invalid_argument("sample_signals: need at least one sample");
  std::vector<Matrix> shaping;
  for (Index k = 0; k < model.users(); ++k) shaping.push_back(model.channel(k) * psd_sqrt(q[k]));
  std::vector<CVector> y;
  y.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    CVector v = rng.complex_normal_matrix(model.rx_antennas(), 1);
    for (const auto& a : shaping) v += a * CVector(rng.complex_normal_matrix(a.cols(), 1));
    y.push_back(std::move(v));
  }
  return y;
}

/// (1/S) sum_s y_s y_s^H. The mean of y is known to be zero, so there is no S/(S-1) factor.
inline HermitianMatrix sample_covariance(const std::vector<CVector>& samples) {
  if (samples.empty()) throw std::invalid_argument("sample_covariance: no samples");
  const Index n = samples.front().size();
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& y : samples) {
    if (y.size() != n) throw std::invalid_argument("sample_covariance: inconsistent sample lengths");
    acc.noalias() += y * y.adjoint();
  }
  return HermitianMatrix(Matrix(acc / static_cast<double>(samples.size())));
}

/// Field the received samples live in. The bias of an inverted sample
/// covariance depends on it: for real Gaussian samples E[W_hat^{-1}] =
/// S/(S-N-1) W^{-1}, for circular complex Gaussian samples it is S/(S-N) W^{-1}.
enum class SampleField { real, complex };

inline double precision_bias_factor(int samples, Index rx_antennas, SampleField field = SampleField::complex) {
  if (samples <= rx_antennas + 1) {
    throw std::invalid_argument("precision_estimate: S = " + std::to_string(samples) + " must exceed N + 1 = " +
                                std::to_string(rx_antennas + 1));
  }
  const Index loss = field == SampleField::real ? rx_antennas + 1 : rx_antennas;
  return static_cast<double>(samples - loss) / samples;
}

/// Bias-adjusted precision estimate factor * W_hat^{-1}; unbiased for W^{-1}
/// when the samples are Gaussian over the given field.
inline HermitianMatrix precision_estimate(const HermitianMatrix& w_hat, int samples, Index rx_antennas,
                                          SampleField field = SampleField::complex) {
  if (w_hat.dim() != rx_antennas) throw std::invalid_argument("precision_estimate: W_hat has wrong size");
  const double factor = precision_bias_factor(samples, rx_antennas, field);
  return inverse(w_hat) * factor;
}

/// S independent measurements H + std * G_s of one channel matrix.
inline std::vector<Matrix> measure_channel(Rng& rng, const Matrix& h, double error_std, int samples,
                                           NoiseLaw law = NoiseLaw::gaussian_symmetric) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    if (error_std == 0.0) {
      out.push_back(h);
    } else if (law == NoiseLaw::gaussian_symmetric) {
      out.push_back(h + rng.complex_normal_matrix(h.rows(), h.cols(), error_std * error_std));
    } else {
      // Uniform on a square with the same per-entry variance: each part has variance std^2/2 = a^2/3.
      const double a = error_std * std::sqrt(1.5);
      Matrix e(h.rows(), h.cols());
      for (Index i = 0; i < e.size(); ++i) e.data()[i] = Complex(rng.uniform(-a, a), rng.uniform(-a, a));
      out.push_back(h + e);
    }
  }
  return out;
}

/// [S(S-1)]^{-1} sum_{s != s'} H_s^H P H_{s'}, hermitized.
inline HermitianMatrix gradient_estimate(const std::vector<Matrix>& channel_samples, const HermitianMatrix& p_hat) {
  const auto s = channel_samples.size();
  if (s < 2) throw std::invalid_argument("gradient_estimate: need at least 2 channel samples");
  const Index m = channel_samples.front().cols();
  // sum_{s != s'} A_s^H P A_{s'} = (sum A)^H P (sum A) - sum A_s^H P A_s.
  Matrix total = Matrix::Zero(channel_samples.front().rows(), m);
  Matrix diag = Matrix::Zero(m, m);
  for (const auto& h : channel_samples) {
    if (h.rows() != p_hat.dim() || h.cols() != m) throw std::invalid_argument("gradient_estimate: shape mismatch");
    total += h;
    diag.noalias() += h.adjoint() * p_hat.matrix() * h;
  }
  const Matrix cross = total.adjoint() * p_hat.matrix() * total - diag;
  return hermitize(cross / static_cast<double>(s * (s - 1)));
}

/// E||Z0||_F for Z0 = (G + G^H)/2 with G an M x M matrix of CN(0,1) entries.
/// ||Z0||_F^2 is half a chi-square with M^2 degrees of freedom.
inline double hermitian_gaussian_mean_norm(Index dim) {
  const double d = static_cast<double>(dim * dim);
  return std::exp(std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5 * d));
}

/// V + Z with Z Hermitian, zero-mean, symmetric, and E||Z||_F = eta ||V||_F.
/// The Gaussian law scales a Gaussian Hermitian matrix; the bounded law puts Z
/// uniformly on the sphere ||Z||_F = eta ||V||_F.
inline HermitianMatrix synthetic_noise(const HermitianMatrix& v, double eta, Rng& rng,
                                       NoiseLaw law = NoiseLaw::gaussian_symmetric) {
  if (!(eta >= 0.0)) throw std::invalid_argument("synthetic_noise: eta must be nonnegative");
  if (eta == 0.0) return v;
  const Index m = v.dim();
  const HermitianMatrix z0(Matrix(rng.complex_normal_matrix(m, m)));
  const double target = eta * v.norm();
  double scale = 0.0;
  if (law == NoiseLaw::gaussian_symmetric) {
    scale = target / hermitian_gaussian_mean_norm(m);
  } else {
    const double n = z0.norm();
    scale = n > 0.0 ? target / n : 0.0;
  }
  return v + z0 * scale;
}

/// How gradient feedback is corrupted before it reaches the learners.
struct NoiseModel {
  enum class Kind { none, synthetic, pipeline };
  Kind kind = Kind::none;
  double eta = 0.0;  // synthetic relative error level
  NoiseLaw law = NoiseLaw::gaussian_symmetric;
  EstimatorConfig estimator;  // pipeline settings

  static NoiseModel exact() { return {}; }
  static NoiseModel relative(double eta, NoiseLaw law = NoiseLaw::gaussian_symmetric) {
    NoiseModel n;
    n.kind = Kind::synthetic;
    n.eta = eta;
    n.law = law;
    return n;
  }
  static NoiseModel sampled(EstimatorConfig cfg) {
    NoiseModel n;
    n.kind = Kind::pipeline;
    n.estimator = cfg;
    n.law = cfg.law;
    return n;
  }
};

/// Gradient feedback V_hat_k at profile q for the users with wanted[k] set
/// (all users when `wanted` is empty). Users not wanted get an empty matrix.
/// The random draws consumed do not depend on `wanted`, so runs that differ
/// only in who updates see the same noise stream.
inline std::vector<HermitianMatrix> estimate_gradients(const NetworkModel& model, const CovarianceProfile& q,
                                                       const NoiseModel& noise, Rng& rng,
                                                       const std::vector<bool>& wanted = {}) {
  const auto users = static_cast<std::size_t>(model.users());
  auto is_wanted = [&](std::size_t k) { return wanted.empty() || wanted[k]; };
  std::vector<HermitianMatrix> out(users);
  switch (noise.kind) {
    case NoiseModel::Kind::none: {
      auto v = gradient(model, q);
      for (std::size_t k = 0; k < users; ++k)
        if (is_wanted(k)) out[k] = std::move(v[k]);
      break;
    }
    case NoiseModel::Kind::synthetic: {
      auto v = gradient(model, q);
      for (std::size_t k = 0; k < users; ++k) {
        auto noisy = synthetic_noise(v[k], noise.eta, rng, noise.law);
        if (is_wanted(k)) out[k] = std::move(noisy);
      }
      break;
    }
    case NoiseModel::Kind::pipeline: {
      const auto& cfg = noise.estimator;
      cfg.validate(model.rx_antennas());
      const auto w_hat = sample_covariance(sample_signals(model, q, rng, cfg.samples));
      const auto p_hat = precision_estimate(w_hat, cfg.samples, model.rx_antennas());
      for (std::size_t k = 0; k < users; ++k) {
        const auto hs = measure_channel(rng, model.channel(static_cast<Index>(k)), cfg.channel_error_std,
                                        cfg.samples, cfg.law);
        if (is_wanted(k)) out[k] = gradient_estimate(hs, p_hat);
      }
      break;
    }
  }
  return out;
}

}  // namespace mxl

#endif  // MXL_ESTIMATION_HPP
