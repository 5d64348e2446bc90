// Copyright 2026 The sphere_langevin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sphere_langevin/geometry.hpp"
#include "sphere_langevin/objective.hpp"
#include "sphere_langevin/random.hpp"

namespace sphere_langevin {
namespace {

SymmetricCostMatrix random_cost(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution keep(0.6);
  std::vector<CostEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (keep(rng)) {
        entries.push_back({i, j, normal(rng)});
      }
    }
  }
  return SymmetricCostMatrix(n, entries);
}

TangentVector random_tangent(const PointOnM& x, Rng& rng) {
  std::normal_distribution<double> normal;
  Factors w(x.factors().rows(), x.factors().cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = normal(rng);
  }
  return project_to_tangent(x, w);
}

Eigen::MatrixXd random_rotation(Eigen::Index k, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g.data()[i] = normal(rng);
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

TEST(SymmetricCostMatrix, Validation) {
  EXPECT_THROW(SymmetricCostMatrix(2, {{0, 2, 1.0}}), std::out_of_range);
  EXPECT_THROW(SymmetricCostMatrix(3, {{0, 1, 1.0}, {1, 0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(SymmetricCostMatrix(0, {}), std::invalid_argument);
  const SymmetricCostMatrix a(3, {{2, 0, 1.5}});
  EXPECT_EQ(a.entries()[0].i, 0u);
  EXPECT_EQ(a.sparse().coeff(2, 0), 1.5);
  EXPECT_EQ(a.sparse().coeff(0, 2), 1.5);
}

TEST(BmValue, Examples) {
  Rng rng(1);
  const PointOnM x = random_point({4, 3}, rng);
  EXPECT_EQ(bm_value(SymmetricCostMatrix(4, {}), x), 0.0);

  Factors f(2, 3);
  f << 0, 1, 0, 0, 1, 0;
  EXPECT_DOUBLE_EQ(bm_value(SymmetricCostMatrix(2, {{0, 1, 1.0}}), PointOnM(f)), -2.0);
  EXPECT_THROW(bm_value(SymmetricCostMatrix(3, {}), PointOnM(f)), ShapeError);
}

TEST(BmValue, CommonRotationInvariance) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const SymmetricCostMatrix a = random_cost(6, rng);
    const PointOnM x = random_point({6, 4}, rng);
    const Eigen::MatrixXd r = random_rotation(5, rng);
    const PointOnM xr = PointOnM::normalized(x.factors() * r);
    EXPECT_NEAR(bm_value(a, xr), bm_value(a, x), 1e-12);
  }
}

TEST(BmGradient, ZeroCostAndCriticalPoint) {
  Rng rng(3);
  const PointOnM x = random_point({3, 2}, rng);
  EXPECT_EQ(bm_riemannian_grad(SymmetricCostMatrix(3, {}), x).norm(), 0.0);

  // Factors at +-e1 make every (Ax)_i parallel to x_i.
  Factors f = Factors::Zero(3, 3);
  f(0, 0) = 1;
  f(1, 0) = -1;
  f(2, 0) = 1;
  const SymmetricCostMatrix a = random_cost(3, rng);
  EXPECT_LE(bm_riemannian_grad(a, PointOnM(f)).norm(), 1e-15);
}

TEST(BmGradient, TangentAndMatchesFiniteDifferences) {
  Rng rng(4);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const SymmetricCostMatrix a = random_cost(n, rng);
    const PointOnM x = random_point({n, 3}, rng);
    const TangentVector g = bm_riemannian_grad(a, x);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_LE(std::abs(g.factors().row(i).dot(x.factor(i))), 1e-10);
    }
    TangentVector v = random_tangent(x, rng);
    v = v.scaled(1.0 / v.norm());
    // Geodesics through x in direction +-v.
    const double fd = (bm_value(a, exp_map(x, v, h)) - bm_value(a, exp_map(x, -v, h))) / (2 * h);
    const double exact = g.inner(v);
    EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST(LipschitzEstimates, FormulasAndClamp) {
  const auto zero = lipschitz_estimates(SymmetricCostMatrix(4, {}), {4, 3});
  EXPECT_EQ(zero.K1, 1.0);
  EXPECT_EQ(zero.K2, 1.0);
  EXPECT_EQ(zero.K3, 1.0);

  std::vector<CostEntry> diag;
  for (std::size_t i = 0; i < 4; ++i) {
    diag.push_back({i, i, 3.0});
  }
  const auto l = lipschitz_estimates(SymmetricCostMatrix(4, diag), {4, 3});
  EXPECT_DOUBLE_EQ(l.K1, 2.0 * 3.0 * 2.0);
  EXPECT_DOUBLE_EQ(l.K2, 12.0);
  EXPECT_DOUBLE_EQ(l.K3, 18.0);
  EXPECT_THROW(lipschitz_estimates(SymmetricCostMatrix(4, {}), {5, 3}), ShapeError);
}

TEST(LipschitzEstimates, GradientNeverExceedsK1) {
  Rng rng(5);
  const SymmetricCostMatrix a = random_cost(8, rng);
  const auto l = lipschitz_estimates(a, {8, 3});
  for (int trial = 0; trial < 1000; ++trial) {
    EXPECT_LE(bm_riemannian_grad(a, random_point({8, 3}, rng)).norm(), l.K1);
  }
}

TEST(BurerMonteiroObjective, SatisfiesInterface) {
  Rng rng(6);
  const SymmetricCostMatrix a = random_cost(5, rng);
  const BurerMonteiroObjective f(a);
  const PointOnM x = random_point({5, 2}, rng);
  EXPECT_EQ(f.value(x), bm_value(a, x));
  EXPECT_LE((riemannian_gradient(f, x).factors() - bm_riemannian_grad(a, x).factors())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
}

}  // namespace
}  // namespace sphere_langevin
