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

#include "mxl/mimo_model.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace mxl {
namespace {

using testing::random_network;
using testing::random_profile;

NetworkModel identity_channel(Index n, double power) {
  return NetworkModel(n, {Matrix::Identity(n, n)}, {power});
}

NetworkModel scalar_channel(Complex h, double power) {
  Matrix m(1, 1);
  m(0, 0) = h;
  return NetworkModel(1, {m}, {power});
}

TEST(NetworkModel, ValidatesConstruction) {
  EXPECT_THROW(NetworkModel(0, {Matrix::Zero(0, 1)}, {1.0}), std::invalid_argument);
  EXPECT_THROW(NetworkModel(2, {}, {}), std::invalid_argument);
  EXPECT_THROW(NetworkModel(2, {Matrix::Zero(3, 1)}, {1.0}), std::invalid_argument);
  EXPECT_THROW(NetworkModel(2, {Matrix::Zero(2, 1)}, {0.0}), std::invalid_argument);
  EXPECT_THROW(NetworkModel(2, {Matrix::Zero(2, 1)}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(NetworkModel(2, {Matrix::Zero(2, 0)}, {1.0}), std::invalid_argument);
  EXPECT_NO_THROW(NetworkModel(2, {Matrix::Zero(2, 1)}, {1.0}));
}

TEST(AggregateCovariance, ZeroProfileAndIdentityChannel) {
  Rng rng(20);
  const auto model = random_network(rng, 3, 4, 1, 3);
  EXPECT_EQ(aggregate_covariance(model, zero_profile(model)), HermitianMatrix::identity(4));

  const auto single = identity_channel(3, 2.0);
  const CovarianceProfile q{testing::random_feasible(rng, 3, 2.0)};
  EXPECT_LE(testing::max_abs_diff(aggregate_covariance(single, q).matrix(),
                                  (HermitianMatrix::identity(3) + q[0]).matrix()),
            1e-15);
}

TEST(AggregateCovariance, MatchesEntrywiseAssembly) {
  Rng rng(21);
  const auto model = random_network(rng, 2, 3, 2, 4);
  const auto q = random_profile(rng, model);
  Matrix w = Matrix::Identity(3, 3);
  for (Index k = 0; k < model.users(); ++k) {
    const Matrix& h = model.channel(k);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j)
        for (Index a = 0; a < h.cols(); ++a)
          for (Index b = 0; b < h.cols(); ++b) w(i, j) += h(i, a) * q[k](a, b) * std::conj(h(j, b));
  }
  EXPECT_LE(testing::max_abs_diff(aggregate_covariance(model, q).matrix(), w), 1e-12);
}

TEST(AggregateCovariance, RejectsDimensionMismatch) {
  Rng rng(22);
  const auto model = random_network(rng, 2, 3, 2, 2);
  CovarianceProfile q = uniform_profile(model);
  q[1] = HermitianMatrix::identity(3);
  EXPECT_THROW(aggregate_covariance(model, q), std::invalid_argument);
  q.pop_back();
  EXPECT_THROW(aggregate_covariance(model, q), std::invalid_argument);
}

TEST(MuiCovariance, SingleUserAndSilentInterferer) {
  Rng rng(23);
  const auto one = random_network(rng, 1, 3, 2, 2);
  EXPECT_LE(testing::max_abs_diff(mui_covariance(one, random_profile(rng, one), 0).matrix(), Matrix::Identity(3, 3)),
            1e-14);
  const auto two = random_network(rng, 2, 3, 2, 2);
  auto q = random_profile(rng, two);
  q[1] = HermitianMatrix::zero(2);
  EXPECT_LE(testing::max_abs_diff(mui_covariance(two, q, 0).matrix(), Matrix::Identity(3, 3)), 1e-14);
  EXPECT_THROW(mui_covariance(two, q, 2), std::out_of_range);
  EXPECT_THROW(mui_covariance(two, q, -1), std::out_of_range);
}

TEST(MuiCovariance, ConsistentWithAggregate) {
  Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    const auto model = random_network(rng, 3, 4, 1, 4);
    const auto q = random_profile(rng, model);
    const auto w = aggregate_covariance(model, q);
    for (Index k = 0; k < 3; ++k) {
      const auto w_minus = mui_covariance(model, q, k);
      EXPECT_GE(min_eigenvalue(w_minus), 1.0 - 1e-10);
      EXPECT_LE(testing::max_abs_diff((w_minus + received_contribution(model, q, k)).matrix(), w.matrix()), 1e-12);
    }
  }
}

TEST(UserRate, ScalarAndSilentUser) {
  const auto model = scalar_channel(1.0, 1.0);
  EXPECT_NEAR(user_rate(model, uniform_profile(model), 0), std::log(2.0), 1e-15);
  Rng rng(25);
  const auto net = random_network(rng, 2, 3, 2, 3);
  auto q = random_profile(rng, net);
  q[0] = HermitianMatrix::zero(net.tx_antennas(0));
  EXPECT_NEAR(user_rate(net, q, 0), 0.0, 1e-14);
}

TEST(UserRate, EqualsSumRateDifferenceForTwoUsers) {
  Rng rng(26);
  for (int t = 0; t < 10; ++t) {
    const auto model = random_network(rng, 2, 3, 1, 4, 0.5, 5.0);
    const auto q = random_profile(rng, model);
    for (Index k = 0; k < 2; ++k) {
      auto silent = q;
      silent[k] = HermitianMatrix::zero(model.tx_antennas(k));
      const double expected = sum_rate(model, q) - sum_rate(model, silent);
      EXPECT_NEAR(user_rate(model, q, k), expected, 1e-12);
      EXPECT_GE(user_rate(model, q, k), 0.0);
    }
  }
}

TEST(SumRate, ClosedForms) {
  Rng rng(27);
  const auto model = random_network(rng, 3, 4, 1, 3);
  EXPECT_NEAR(sum_rate(model, zero_profile(model)), 0.0, 1e-15);
  for (Index m : {1, 2, 5}) {
    const double p = 3.0;
    const auto eye = identity_channel(m, p);
    EXPECT_NEAR(sum_rate(eye, uniform_profile(eye)), static_cast<double>(m) * std::log(1.0 + p / m), 1e-13);
  }
}

// Independent route: log|det W| from an LU factorization.
TEST(SumRate, MatchesLuDeterminant) {
  Rng rng(28);
  for (int t = 0; t < 20; ++t) {
    const auto model = random_network(rng, rng.uniform_int(1, 4), rng.uniform_int(1, 6), 1, 4, 0.1, 10.0);
    const auto q = random_profile(rng, model);
    const Matrix w = aggregate_covariance(model, q).matrix();
    const double lu = std::log(std::abs(w.partialPivLu().determinant()));
    EXPECT_NEAR(sum_rate(model, q), lu, 1e-10 * std::max(1.0, lu));
  }
}

TEST(SumRate, ConcaveAlongMidpoints) {
  Rng rng(29);
  for (int t = 0; t < 50; ++t) {
    const auto model = random_network(rng, rng.uniform_int(1, 3), rng.uniform_int(1, 4), 1, 4, 0.5, 4.0);
    const auto a = random_profile(rng, model);
    const auto b = random_profile(rng, model);
    CovarianceProfile mid;
    for (std::size_t k = 0; k < a.size(); ++k) mid.push_back((a[k] + b[k]) * 0.5);
    EXPECT_GE(sum_rate(model, mid), 0.5 * (sum_rate(model, a) + sum_rate(model, b)) - 1e-10);
  }
}

TEST(Gradient, ScalarAndZeroProfile) {
  const auto model = scalar_channel(1.0, 1.0);
  const auto v = gradient(model, uniform_profile(model));
  EXPECT_NEAR(v[0](0, 0).real(), 0.5, 1e-15);

  Rng rng(30);
  const auto one = random_network(rng, 1, 3, 3, 3);
  const auto v0 = gradient(one, zero_profile(one));
  const Matrix hh = one.channel(0).adjoint() * one.channel(0);
  EXPECT_LE(testing::max_abs_diff(v0[0].matrix(), hh), 1e-13);
}

TEST(Gradient, DirectionalDerivativeMatchesFiniteDifferences) {
  Rng rng(31);
  const double eps = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const auto model = random_network(rng, 2, rng.uniform_int(1, 4), 1, 4, 0.5, 3.0);
    const auto q = random_profile(rng, model);
    const auto v = gradient(model, q);
    for (Index k = 0; k < 2; ++k) {
      const auto dir = testing::random_hermitian(rng, model.tx_antennas(k));
      auto plus = q;
      auto minus = q;
      plus[k] += dir * eps;
      minus[k] -= dir * eps;
      const double fd = (sum_rate(model, plus) - sum_rate(model, minus)) / (2.0 * eps);
      const double analytic = trace_product(v[k], dir);
      EXPECT_LE(std::abs(fd - analytic), 1e-6 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST(Gradient, PositiveSemidefinite) {
  Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    const auto model = random_network(rng, 3, 4, 1, 5, 0.1, 10.0);
    for (const auto& v : gradient(model, random_profile(rng, model))) EXPECT_GE(min_eigenvalue(v), -1e-12);
  }
}

TEST(PotentialResidual, Examples) {
  Rng rng(33);
  const auto one = random_network(rng, 1, 3, 2, 2);
  const auto q1 = random_profile(rng, one);
  EXPECT_LE(potential_residual(one, q1, 0, testing::random_feasible(rng, 2, 1.0)), 1e-12);

  const auto model = random_network(rng, 3, 4, 1, 4);
  const auto q = random_profile(rng, model);
  EXPECT_EQ(potential_residual(model, q, 1, q[1]), 0.0);
}

TEST(PotentialResidual, VanishesOnRandomInstances) {
  Rng rng(34);
  for (int t = 0; t < 100; ++t) {
    const auto model = random_network(rng, 3, rng.uniform_int(1, 5), 1, 4, 0.2, 5.0);
    const auto q = random_profile(rng, model);
    const Index k = rng.uniform_int(0, 2);
    const auto alt = testing::random_feasible(rng, model.tx_antennas(k), model.power(k));
    EXPECT_LE(potential_residual(model, q, k, alt), 1e-10);
  }
}

TEST(StaticChannel, ZeroScaleAndDeterminism) {
  Rng rng(35);
  EXPECT_EQ(sample_static_channel(rng, 3, 2, 0.0), Matrix::Zero(3, 2));
  Rng a(99), b(99);
  EXPECT_EQ(sample_static_channel(a, 4, 3, 1.5), sample_static_channel(b, 4, 3, 1.5));
  EXPECT_THROW(sample_static_channel(rng, 0, 2), std::invalid_argument);
}

TEST(StaticChannel, EntryVarianceMatchesScale) {
  Rng rng(36);
  const double scale = 1.7;
  const int draws = 100000;
  double sum = 0.0;
  Complex mean = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Complex h = sample_static_channel(rng, 1, 1, scale)(0, 0);
    sum += std::norm(h);
    mean += h;
  }
  const double var = sum / draws;
  // |h|^2 is exponential with mean scale^2, so its sample mean has std scale^2/sqrt(n).
  EXPECT_LE(std::abs(var - scale * scale), 3.0 * scale * scale / std::sqrt(draws));
  EXPECT_LE(std::abs(mean / static_cast<double>(draws)), 3.0 * scale / std::sqrt(draws));
}

TEST(Jakes, DopplerFrequency) {
  EXPECT_NEAR(doppler_frequency(5.0, 2e9), 33.3556, 1e-4);
  Rng rng(37);
  const auto s = make_jakes(rng, 2, {2}, 5.0, 2e9);
  EXPECT_NEAR(s.doppler_hz, 5.0 * 2e9 / 2.998e8, 1e-12);
}

TEST(Jakes, ZeroStepAndNegativeStep) {
  Rng rng(38);
  const auto s = make_jakes(rng, 3, {2, 1}, 15.0, 2e9);
  const auto same = jakes_advance(s, 0.0);
  EXPECT_EQ(same.channels[0], s.channels[0]);
  EXPECT_EQ(same.channels[1], s.channels[1]);
  EXPECT_EQ(same.time_s, s.time_s);
  EXPECT_THROW(jakes_advance(s, -1e-3), std::invalid_argument);
  EXPECT_THROW(make_jakes(rng, 2, {2}, 5.0, 2e9, 8), std::invalid_argument);
}

TEST(Jakes, AutocorrelationFollowsBessel) {
  Rng rng(39);
  auto s = make_jakes(rng, 4, {4}, 5.0, 2e9);
  const double tau = 1.0 / (4.0 * s.doppler_hz);
  const int sub = 5;  // lag = 5 steps
  const double dt = tau / sub;
  const int steps = 100000;
  const Index entries = 16;
  std::vector<Matrix> history;
  history.reserve(sub + 1);
  Eigen::ArrayXd corr = Eigen::ArrayXd::Zero(entries);
  Eigen::ArrayXd power = Eigen::ArrayXd::Zero(entries);
  Eigen::ArrayXcd mean = Eigen::ArrayXcd::Zero(entries);
  std::vector<Matrix> ring(sub + 1);
  for (int n = 0; n < steps + sub; ++n) {
    ring[n % (sub + 1)] = s.channels[0];
    if (n >= sub) {
      const Matrix& now = ring[n % (sub + 1)];
      const Matrix& past = ring[(n - sub) % (sub + 1)];
      for (Index e = 0; e < entries; ++e) {
        corr(e) += (now.data()[e] * std::conj(past.data()[e])).real();
        power(e) += std::norm(now.data()[e]);
        mean(e) += now.data()[e];
      }
    }
    s = jakes_advance(s, dt);
  }
  corr /= steps;
  power /= steps;
  mean /= static_cast<double>(steps);
  const double j0 = std::cyl_bessel_j(0.0, std::numbers::pi / 2.0);
  EXPECT_NEAR(j0, 0.4720, 1e-4);
  EXPECT_NEAR(corr.mean(), j0, 0.05);
  for (Index e = 0; e < entries; ++e) EXPECT_NEAR(corr(e), j0, 0.05) << "entry " << e;
  EXPECT_NEAR(power.mean(), 1.0, 0.05);
  EXPECT_LE(std::abs(mean.mean()), 0.05);
}

// Ensemble marginals over independent realizations at a fixed time.
TEST(Jakes, EnsembleMarginalIsUnitComplexGaussian) {
  Rng rng(40);
  const int reps = 4000;
  double power = 0.0, fourth = 0.0;
  Complex mean = 0.0;
  int count = 0;
  for (int r = 0; r < reps; ++r) {
    auto s = jakes_advance(make_jakes(rng, 2, {2}, 5.0, 2e9), 0.37);
    for (Index e = 0; e < 4; ++e) {
      const Complex h = s.channels[0].data()[e];
      power += std::norm(h);
      fourth += std::norm(h) * std::norm(h);
      mean += h;
      ++count;
    }
  }
  power /= count;
  fourth /= count;
  EXPECT_NEAR(power, 1.0, 3.0 / std::sqrt(count));
  EXPECT_LE(std::abs(mean / static_cast<double>(count)), 3.0 / std::sqrt(count));
  // E|h|^4 = 2 for CN(0,1); a 16-term phasor sum gives 2 - 1/16.
  EXPECT_NEAR(fourth, 2.0, 0.15);
}

}  // namespace
}  // namespace mxl
