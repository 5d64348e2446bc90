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
#include <numbers>
#include <random>

#include "sphere_langevin/geometry.hpp"
#include "sphere_langevin/random.hpp"

namespace sphere_langevin {
namespace {

constexpr double kPi = std::numbers::pi;

PointOnM point(std::initializer_list<std::initializer_list<double>> rows) {
  Factors f(static_cast<Eigen::Index>(rows.size()),
            static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) {
      f(i, j++) = v;
    }
    ++i;
  }
  return PointOnM(f);
}

TangentVector tangent(const PointOnM& base, std::initializer_list<std::initializer_list<double>> rows) {
  Factors f(base.factors().rows(), base.factors().cols());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) {
      f(i, j++) = v;
    }
    ++i;
  }
  return TangentVector(base, f);
}

TangentVector random_tangent(const PointOnM& x, Rng& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Factors w(x.factors().rows(), x.factors().cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = normal(rng);
  }
  return project_to_tangent(x, w);
}

TEST(PointOnM, RejectsNonUnitFactor) {
  Factors f(1, 3);
  f << 1.0, 1e-4, 0.0;
  EXPECT_THROW(PointOnM{f}, std::invalid_argument);
  EXPECT_NO_THROW(PointOnM::normalized(f));
}

TEST(PointOnM, RejectsDegenerateShape) {
  EXPECT_THROW(PointOnM(Factors(1, 1)), std::invalid_argument);
  EXPECT_THROW((ManifoldShape{0, 2}.validate()), std::invalid_argument);
}

TEST(TangentVector, RejectsRadialComponent) {
  const PointOnM x = point({{1, 0, 0}});
  EXPECT_THROW(tangent(x, {{0.5, 1, 0}}), std::invalid_argument);
}

TEST(ExpMap, QuarterGreatCircle) {
  const PointOnM x = point({{1, 0, 0}});
  const PointOnM y = exp_map(x, tangent(x, {{0, 1, 0}}), kPi / 2);
  EXPECT_NEAR(y.factors()(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(y.factors()(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(y.factors()(0, 2), 0.0, 1e-15);
}

TEST(ExpMap, Antipode) {
  const PointOnM x = point({{1, 0, 0}});
  const PointOnM y = exp_map(x, tangent(x, {{0, 1, 0}}), kPi);
  EXPECT_NEAR(y.factors()(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(y.factors()(0, 1), 0.0, 1e-15);
}

TEST(ExpMap, ZeroStepAndZeroFactorAreIdentity) {
  Rng rng(3);
  const PointOnM x = random_point({4, 3}, rng);
  const TangentVector v = random_tangent(x, rng, 1.0);
  EXPECT_EQ(exp_map(x, v, 0.0).factors(), x.factors());

  Factors vf = v.factors();
  vf.row(2).setZero();
  const PointOnM y = exp_map(x, TangentVector(x, vf), 0.7);
  EXPECT_EQ(y.factors().row(2), x.factors().row(2));
}

TEST(ExpMap, Errors) {
  Rng rng(4);
  const PointOnM x = random_point({2, 3}, rng);
  const PointOnM other = random_point({3, 3}, rng);
  EXPECT_THROW(exp_map(x, TangentVector::zero(other), 1.0), ShapeError);
  EXPECT_THROW(exp_map(x, TangentVector::zero(x), -1.0), std::invalid_argument);
}

TEST(LogMap, CoincidentAndQuarter) {
  const PointOnM x = point({{1, 0, 0}});
  EXPECT_EQ(log_map(x, x).norm(), 0.0);
  const TangentVector v = log_map(x, point({{0, 1, 0}}));
  EXPECT_NEAR(v.factors()(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(v.factors()(0, 1), kPi / 2, 1e-15);
  EXPECT_NEAR(v.factors()(0, 2), 0.0, 1e-15);
}

TEST(LogMap, AntipodalIsAnError) {
  const PointOnM x = point({{1, 0, 0}, {0, 0, 1}});
  EXPECT_THROW(log_map(x, point({{-1, 0, 0}, {0, 0, 1}})), CutLocusError);
}

TEST(LogMap, RoundTripSmallSteps) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const PointOnM x = random_point({3, 4}, rng);
    const TangentVector v = random_tangent(x, rng, 0.2);
    const TangentVector back = log_map(x, exp_map(x, v, 1.0));
    EXPECT_LE((back.factors() - v.factors()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(GeodesicDistance, Basics) {
  const PointOnM x = point({{1, 0, 0}});
  EXPECT_EQ(geodesic_distance(x, x), 0.0);
  EXPECT_NEAR(geodesic_distance(x, point({{-1, 0, 0}})), kPi, 1e-15);

  const PointOnM a = point({{1, 0, 0}, {0, 1, 0}});
  const PointOnM b = point({{0, 1, 0}, {0, 0, 1}});
  EXPECT_NEAR(geodesic_distance(a, b), std::sqrt(2.0) * kPi / 2, 1e-15);
  EXPECT_THROW(geodesic_distance(a, x), ShapeError);
}

TEST(GeodesicDistance, SymmetricAndBounded) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const PointOnM x = random_point({5, 2}, rng);
    const PointOnM y = random_point({5, 2}, rng);
    const double dxy = geodesic_distance(x, y);
    EXPECT_DOUBLE_EQ(dxy, geodesic_distance(y, x));
    EXPECT_GE(dxy, 0.0);
    EXPECT_LE(dxy, kPi * std::sqrt(5.0));
  }
}

TEST(ProjectToTangent, Examples) {
  const PointOnM x = point({{1, 0, 0}});
  Factors w(1, 3);
  w << 2, 3, 0;
  const TangentVector v = project_to_tangent(x, w);
  EXPECT_EQ(v.factors()(0, 0), 0.0);
  EXPECT_EQ(v.factors()(0, 1), 3.0);

  EXPECT_NEAR(project_to_tangent(x, x.factors()).norm(), 0.0, 1e-15);
  EXPECT_THROW(project_to_tangent(x, Factors::Zero(2, 3)), ShapeError);
}

TEST(ProjectToTangent, LinearIdempotentAnnihilatesRadial) {
  Rng rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    const PointOnM x = random_point({3, 5}, rng);
    Factors w1(3, 6), w2(3, 6);
    for (Eigen::Index i = 0; i < w1.size(); ++i) {
      w1.data()[i] = normal(rng);
      w2.data()[i] = normal(rng);
    }
    const TangentVector p1 = project_to_tangent(x, w1);
    const TangentVector p2 = project_to_tangent(x, w2);
    const TangentVector p12 = project_to_tangent(x, 2.0 * w1 - 3.0 * w2);
    EXPECT_LE((p12.factors() - (2.0 * p1.factors() - 3.0 * p2.factors())).cwiseAbs().maxCoeff(),
              1e-12);
    EXPECT_LE((project_to_tangent(x, p1.factors()).factors() - p1.factors()).cwiseAbs().maxCoeff(),
              1e-14);
    for (Eigen::Index i = 0; i < 3; ++i) {
      EXPECT_LE(std::abs(p1.factors().row(i).dot(x.factors().row(i))), 1e-12);
    }
  }
}

TEST(RandomPoint, UniformMoments) {
  Rng rng(8);
  const std::size_t d = 4;
  const int draws = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d + 1);
  double sq = 0.0;
  for (int s = 0; s < draws; ++s) {
    const PointOnM x = random_point({1, d}, rng);
    sum += x.factors().row(0).transpose();
    sq += x.factors()(0, 0) * x.factors()(0, 0);
  }
  // Each coordinate has variance 1/(d+1) under the uniform law; five
  // simultaneous comparisons get a 4 SE bar.
  const double se = std::sqrt(1.0 / (d + 1) / draws);
  for (Eigen::Index j = 0; j < sum.size(); ++j) {
    EXPECT_LE(std::abs(sum[j] / draws), 4 * se);
  }
  // E[x_1^2] = 1/(d+1); Var[x_1^2] = E[x_1^4] - E[x_1^2]^2 with E[x_1^4] = 3/((d+1)(d+3)).
  const double m4 = 3.0 / ((d + 1.0) * (d + 3.0));
  const double se2 = std::sqrt((m4 - 1.0 / ((d + 1.0) * (d + 1.0))) / draws);
  EXPECT_LE(std::abs(sq / draws - 1.0 / (d + 1)), 3 * se2);
}

TEST(GeometryProperties, GeodesicLengthAndNormPreservation) {
  Rng rng(9);
  std::uniform_real_distribution<double> unif(0.0, kPi);
  for (int trial = 0; trial < 2000; ++trial) {
    const PointOnM x = random_point({3, 3}, rng);
    Factors vf = Factors::Zero(3, 4);
    const Eigen::Index active = trial % 3;
    vf.row(active) = random_tangent(x, rng, 1.0).factors().row(active);
    vf.row(active) /= vf.row(active).norm();
    const double t = unif(rng);
    const PointOnM y = exp_map(x, TangentVector(x, vf), t);
    EXPECT_NEAR(geodesic_distance(x, y), t, 1e-9);
    EXPECT_LE(PointOnM::max_norm_error(y.factors()), 1e-10);
  }
}

}  // namespace
}  // namespace sphere_langevin
