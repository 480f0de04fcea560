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

#ifndef MXL_WATERFILLING_HPP
#define MXL_WATERFILLING_HPP

#include "mxl/hermitian.hpp"
#include "mxl/mimo_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mxl {

struct WaterfillResult {
  HermitianMatrix q;
  double water_level = 0.0;  // mu; NaN when every gain vanishes
  Index active_modes = 0;
};

/// Gains at or below this fraction of the largest one are treated as zero.
inline constexpr double kZeroGainRatio = 1e-14;

struct PowerAllocation {
  RVector powers;
  double water_level = 0.0;
  Index active_modes = 0;
};

/// q_i = max(0, mu - 1/g_i) with sum q_i = P, by exact search over the
/// number of active modes. All-zero gains give the uniform split.
inline PowerAllocation waterfill_gains(const RVector& gains, double power) {
  if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("waterfill: power must be positive");
  if (gains.size() == 0) throw std::invalid_argument("waterfill: no modes");
  if (!gains.allFinite()) throw std::invalid_argument("waterfill: non-finite gains");
  const Index m = gains.size();
  const double top = gains.maxCoeff();
  PowerAllocation out;
  out.powers = RVector::Zero(m);
  if (!(top > 0.0)) {
    out.powers.setConstant(power / static_cast<double>(m));
    out.water_level = std::numeric_limits<double>::quiet_NaN();
    out.active_modes = m;
    return out;
  }
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return gains(a) > gains(b); });

  double inv_sum = 0.0;
  double mu = 0.0;
  Index active = 0;
  for (Index j = 0; j < m; ++j) {
    const double g = gains(order[static_cast<std::size_t>(j)]);
    if (g <= kZeroGainRatio * top) break;
    const double candidate = (power + inv_sum + 1.0 / g) / static_cast<double>(j + 1);
    if (candidate <= 1.0 / g) break;  // mode j would get no power
    inv_sum += 1.0 / g;
    mu = candidate;
    active = j + 1;
  }
  for (Index j = 0; j < active; ++j) {
    const Index i = order[static_cast<std::size_t>(j)];
    out.powers(i) = mu - 1.0 / gains(i);
  }
  out.water_level = mu;
  out.active_modes = active;
  return out;
}

/// Water-filling against the Gram matrix G = H_eff^H H_eff.
inline WaterfillResult waterfill_gram(const HermitianMatrix& gram, double power) {
  const auto eig = herm_eig(gram);
  const RVector gains = eig.eigenvalues.cwiseMax(0.0);
  const auto alloc = waterfill_gains(gains, power);
  HermitianMatrix q(Matrix(eig.eigenvectors * alloc.powers.asDiagonal() * eig.eigenvectors.adjoint()));
  if (std::isnan(alloc.water_level)) q = HermitianMatrix::identity(gram.dim()) * (power / static_cast<double>(gram.dim()));
  return {q, alloc.water_level, alloc.active_modes};
}

inline WaterfillResult waterfill_single(const Matrix& h_eff, double power) {
  if (!h_eff.allFinite()) throw std::invalid_argument("waterfill_single: non-finite channel");
  if (h_eff.cols() < 1) throw std::invalid_argument("waterfill_single: channel has no columns");
  return waterfill_gram(HermitianMatrix(Matrix(h_eff.adjoint() * h_eff)), power);
}

/// Effective channel W_{-k}^{-1/2} H_k seen by user k.
inline Matrix effective_channel(const NetworkModel& model, const CovarianceProfile& q, Index k) {
  return inverse_sqrt(mui_covariance(model, q, k)).matrix() * model.channel(k);
}

/// Single-user optimum of user k against the interference in q.
inline HermitianMatrix best_response(const NetworkModel& model, const CovarianceProfile& q, Index k) {
  return waterfill_single(effective_channel(model, q, k), model.power(k)).q;
}

/// Round-robin water-filling: only user k moves.
inline CovarianceProfile iwf_step(const NetworkModel& model, CovarianceProfile q, Index k) {
  check_profile(model, q);
  check_user_index(model, k);
  q[static_cast<std::size_t>(k)] = best_response(model, q, k);
  return q;
}

/// Simultaneous water-filling: all users best-respond to the same old profile.
inline CovarianceProfile swf_step(const NetworkModel& model, const CovarianceProfile& q) {
  check_profile(model, q);
  CovarianceProfile next;
  for (Index k = 0; k < model.users(); ++k) next.push_back(best_response(model, q, k));
  return next;
}

/// Effective Gram matrix H_k^H W_{-k}^{-1} H_k implied by gradient feedback
/// V_k = H_k^H W^{-1} H_k at the user's own Q_k: G = (I - V Q)^{-1} V.
/// With noisy V the result is hermitized and its negative part dropped; if
/// I - V Q is singular the feedback itself is used.
inline HermitianMatrix implied_gram(const HermitianMatrix& v, const HermitianMatrix& qk) {
  if (v.dim() != qk.dim()) throw std::invalid_argument("implied_gram: dimension mismatch");
  const Index m = v.dim();
  const Matrix a = Matrix::Identity(m, m) - v.matrix() * qk.matrix();
  Eigen::FullPivLU<Matrix> lu(a);
  Matrix g = v.matrix();
  if (lu.isInvertible()) {
    const Matrix solved = lu.solve(v.matrix());
    if (solved.allFinite()) g = solved;
  }
  const auto eig = herm_eig(HermitianMatrix(g));
  return eig.apply([](double x) { return std::max(x, 0.0); });
}

/// Water-filling driven by (possibly noisy) gradient feedback instead of the
/// true interference, so baselines can share the learners' noise draws.
inline HermitianMatrix feedback_best_response(const HermitianMatrix& v_hat, const HermitianMatrix& qk, double power) {
  return waterfill_gram(implied_gram(v_hat, qk), power).q;
}

inline CovarianceProfile iwf_step_feedback(const NetworkModel& model, CovarianceProfile q, Index k,
                                           const HermitianMatrix& v_hat_k) {
  check_profile(model, q);
  check_user_index(model, k);
  auto& qk = q[static_cast<std::size_t>(k)];
  qk = feedback_best_response(v_hat_k, qk, model.power(k));
  return q;
}

inline CovarianceProfile swf_step_feedback(const NetworkModel& model, const CovarianceProfile& q,
                                           const std::vector<HermitianMatrix>& v_hat) {
  check_profile(model, q);
  if (v_hat.size() != q.size()) throw std::invalid_argument("swf_step_feedback: one gradient per user expected");
  CovarianceProfile next;
  for (std::size_t k = 0; k < q.size(); ++k)
    next.push_back(feedback_best_response(v_hat[k], q[k], model.power(static_cast<Index>(k))));
  return next;
}

}  // namespace mxl

#endif  // MXL_WATERFILLING_HPP
