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

// Shared generators for the test suites.

#ifndef MXL_TESTS_TEST_SUPPORT_HPP
#define MXL_TESTS_TEST_SUPPORT_HPP

#include "mxl/hermitian.hpp"
#include "mxl/mimo_model.hpp"
#include "mxl/random.hpp"

#include <vector>

namespace mxl::testing {

inline HermitianMatrix random_hermitian(Rng& rng, Index dim, double scale = 1.0) {
  return HermitianMatrix(Matrix(rng.complex_normal_matrix(dim, dim, scale * scale)));
}

/// Random PSD matrix with trace `power` and full rank (normalized Wishart).
inline HermitianMatrix random_feasible(Rng& rng, Index dim, double power) {
  const Matrix g = rng.complex_normal_matrix(dim, dim);
  HermitianMatrix w(Matrix(g * g.adjoint()));
  return w * (power / w.trace());
}

/// Random PSD matrix with trace `power` and rank `rank`.
inline HermitianMatrix random_low_rank(Rng& rng, Index dim, Index rank, double power) {
  const Matrix g = rng.complex_normal_matrix(dim, rank);
  HermitianMatrix w(Matrix(g * g.adjoint()));
  return w * (power / w.trace());
}

inline CovarianceProfile random_profile(Rng& rng, const NetworkModel& model) {
  CovarianceProfile q;
  for (Index k = 0; k < model.users(); ++k) q.push_back(random_feasible(rng, model.tx_antennas(k), model.power(k)));
  return q;
}

inline NetworkModel random_network(Rng& rng, Index users, Index rx, Index tx_lo, Index tx_hi, double p_lo = 1.0,
                                   double p_hi = 1.0) {
  std::vector<Index> tx;
  std::vector<double> powers;
  for (Index k = 0; k < users; ++k) {
    tx.push_back(rng.uniform_int(static_cast<int>(tx_lo), static_cast<int>(tx_hi)));
    powers.push_back(p_lo == p_hi ? p_lo : rng.uniform(p_lo, p_hi));
  }
  return draw_network(rng, rx, tx, powers);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace mxl::testing

#endif  // MXL_TESTS_TEST_SUPPORT_HPP
