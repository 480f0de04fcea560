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

#include "mxl/oracle.hpp"
#include "mxl/waterfilling.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace mxl {
namespace {

using testing::random_network;

TEST(FwGap, ScalarUserHasNoGap) {
  Rng rng(1);
  const auto model = draw_network(rng, 3, {1}, {2.0});
  EXPECT_NEAR(fw_gap(model, uniform_profile(model)), 0.0, 1e-14);
}

TEST(FwGap, UsesTopEigenvalue) {
  Rng rng(2);
  const auto model = random_network(rng, 2, 4, 2, 4);
  const auto q = testing::random_profile(rng, model);
  const auto v = gradient(model, q);
  double manual = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto eig = herm_eig(v[k]);
    EXPECT_NEAR(max_eigenvalue(v[k]), eig.eigenvalues.maxCoeff(), 1e-12);
    manual += model.power(static_cast<Index>(k)) * eig.eigenvalues.maxCoeff() - trace_product(q[k], v[k]);
  }
  EXPECT_NEAR(fw_gap(model, q), manual, 1e-12);
}

TEST(FwGap, BoundsSuboptimality) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = random_network(rng, 3, 4, 1, 4, 0.5, 5.0);
    const auto oracle = solve_capacity(model);
    ASSERT_TRUE(oracle.converged);
    for (int j = 0; j < 50; ++j) {
      const auto q = testing::random_profile(rng, model);
      EXPECT_LE(oracle.rate - sum_rate(model, q), fw_gap(model, q) + 1e-9);
    }
  }
}

TEST(SolveCapacity, IdentityChannel) {
  const NetworkModel model(2, {Matrix::Identity(2, 2)}, {2.0});
  const auto s = solve_capacity(model);
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.rate, 2.0 * std::log(2.0), 1e-12);
  EXPECT_LE(testing::max_abs_diff(s.q[0].matrix(), Matrix::Identity(2, 2)), 1e-12);
}

TEST(SolveCapacity, ScalarChannel) {
  for (double p : {0.1, 1.0, 30.0}) {
    Matrix h(1, 1);
    h(0, 0) = Complex(0.6, -1.3);
    const NetworkModel model(1, {h}, {p});
    EXPECT_NEAR(solve_capacity(model).rate, std::log(1.0 + std::norm(h(0, 0)) * p), 1e-12);
  }
}

TEST(SolveCapacity, CertificateSoundness) {
  Rng rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const auto model = random_network(rng, 3, 4, 2, 4, 0.5, 5.0);
    const auto s = solve_capacity(model);
    ASSERT_TRUE(s.converged);
    EXPECT_LE(s.gap, 1e-8);
    EXPECT_LE(fw_gap(model, s.q), 1e-8);
    EXPECT_TRUE(is_feasible(model, s.q));
    for (int j = 0; j < 1000; ++j) EXPECT_LE(sum_rate(model, testing::random_profile(rng, model)), s.rate + 1e-8);
  }
}

TEST(SolveCapacity, LargeInstanceConverges) {
  Rng rng(5);
  const auto model = random_network(rng, 20, 24, 2, 8);
  const auto s = solve_capacity(model);
  EXPECT_TRUE(s.converged);
  EXPECT_LE(fw_gap(model, s.q), 1e-8);
}

TEST(SolveCapacity, IterationCapReturnsBestIterate) {
  Rng rng(6);
  const auto model = random_network(rng, 4, 4, 2, 4);
  SolverOptions opts;
  opts.mxl_stage = 5;
  opts.max_sweeps = 0;
  const auto s = solve_capacity(model, opts);
  EXPECT_FALSE(s.converged);
  EXPECT_GT(s.gap, 1e-8);
  EXPECT_NEAR(s.gap, fw_gap(model, s.q), 1e-12);
  EXPECT_LE(s.gap, fw_gap(model, uniform_profile(model)));
}

// Brute force for K = 2, M = 2: user 1 is Q_1 = p u u^H + (P - p) w w^H with
// u = (cos t, e^{i f} sin t) and w orthogonal to u; user 2 best-responds by
// water-filling, which is exact for fixed Q_1. The grid is zoomed around the
// best cell a few times.
double grid_capacity(const NetworkModel& model) {
  const double power = model.power(0);
  auto profile = [&](double p, double t, double f) {
    CVector u(2), w(2);
    const Complex e = std::polar(1.0, f);
    u << std::cos(t), e * std::sin(t);
    w << -std::sin(t), e * std::cos(t);
    const HermitianMatrix q1(Matrix(p * u * u.adjoint() + (power - p) * w * w.adjoint()));
    CovarianceProfile q{q1, HermitianMatrix::identity(2) * (model.power(1) / 2.0)};
    q[1] = best_response(model, q, 1);
    return q;
  };
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {power, std::numbers::pi / 2.0, 2.0 * std::numbers::pi};
  double best = -1.0;
  double arg[3] = {0.0, 0.0, 0.0};
  const int g = 24;
  for (int round = 0; round < 6; ++round) {
    for (int i = 0; i <= g; ++i)
      for (int j = 0; j <= g; ++j)
        for (int l = 0; l <= g; ++l) {
          const double p = lo[0] + (hi[0] - lo[0]) * i / g;
          const double t = lo[1] + (hi[1] - lo[1]) * j / g;
          const double f = lo[2] + (hi[2] - lo[2]) * l / g;
          const double r = sum_rate(model, profile(std::clamp(p, 0.0, power), t, f));
          if (r > best) {
            best = r;
            arg[0] = p;
            arg[1] = t;
            arg[2] = f;
          }
        }
    for (int d = 0; d < 3; ++d) {
      const double half = 2.0 * (hi[d] - lo[d]) / g;
      lo[d] = arg[d] - half;
      hi[d] = arg[d] + half;
    }
  }
  return best;
}

TEST(SolveCapacity, AgreesWithGridSearch) {
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    Rng rng(seed, Stream::channel);
    const auto model = draw_network(rng, 2, {2, 2}, {1.0, 2.0});
    const double grid = grid_capacity(model);
    const auto s = solve_capacity(model);
    EXPECT_NEAR(s.rate, grid, 1e-3) << "seed " << seed;
    EXPECT_GE(s.rate, grid - 1e-8);
  }
}

TEST(PooledObjective, DegenerateAndDuplicatedPools) {
  Rng rng(7);
  const auto model = random_network(rng, 2, 3, 2, 3);
  SolverOptions opts;
  opts.tol = 1e-6;
  const auto single = maximize_rate(PooledObjective({model}), opts);
  const auto doubled = maximize_rate(PooledObjective({model, model}), opts);
  const auto fixed = maximize_rate(StaticObjective(model), opts);
  EXPECT_TRUE(fixed.converged);
  EXPECT_NEAR(single.rate, fixed.rate, 1e-12);
  EXPECT_NEAR(doubled.rate, fixed.rate, 1e-12);
  EXPECT_NEAR(solve_capacity(model).rate, fixed.rate, 1e-6);
  EXPECT_THROW(PooledObjective({}), std::invalid_argument);
  EXPECT_THROW(PooledObjective({model, random_network(rng, 3, 3, 2, 3)}), std::invalid_argument);
}

TEST(ErgodicCapacity, SampleAverageIsStable) {
  Rng small(8, Stream::channel, 0);
  Rng large(8, Stream::channel, 1);
  SolverOptions opts;
  opts.tol = 1e-5;
  const auto a = solve_ergodic_capacity(small, 2, {2, 2}, {1.0, 1.0}, 10000, opts);
  const auto b = solve_ergodic_capacity(large, 2, {2, 2}, {1.0, 1.0}, 40000, opts);
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  EXPECT_NEAR(a.rate, b.rate, 0.01 * b.rate);
}

}  // namespace
}  // namespace mxl
