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

#include "sphere_langevin/brownian.hpp"
#include "sphere_langevin/random.hpp"
#include "sphere_langevin/validation.hpp"

namespace sphere_langevin {
namespace {

Eigen::MatrixXd householder_matrix(const Eigen::RowVectorXd& z) {
  const auto n = z.size();
  Eigen::MatrixXd o(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    o.col(j) = householder_to(z, Eigen::RowVectorXd::Unit(n, j)).transpose();
  }
  return o;
}

TEST(Householder, MapsPoleToZAndIsOrthogonal) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::RowVectorXd z = random_unit_vector(5, rng);
    const Eigen::MatrixXd o = householder_matrix(z);
    EXPECT_LE((o * Eigen::VectorXd::Unit(5, 4) - z.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((o.transpose() * o - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Householder, NorthPoleIsIdentity) {
  const Eigen::RowVectorXd pole = Eigen::RowVectorXd::Unit(4, 3);
  EXPECT_EQ(householder_matrix(pole), Eigen::MatrixXd::Identity(4, 4));
  Rng rng(22);
  const Eigen::RowVectorXd w = brownian_increment_sphere(pole, 0.3, {}, {}, rng);
  EXPECT_NEAR(w.norm(), 1.0, 1e-14);
}

TEST(LangevinTime, Arithmetic) {
  EXPECT_DOUBLE_EQ(langevin_time(0.01, 200.0), 1e-4);
  EXPECT_DOUBLE_EQ(langevin_time(1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(langevin_time(0.3, 40.0), 2.0 * langevin_time(0.3, 80.0));
  EXPECT_THROW(langevin_time(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(langevin_time(1.0, -1.0), std::invalid_argument);
}

TEST(IncrementPath, Selection) {
  const SeriesTolerances tol;
  EXPECT_EQ(increment_path(0.5, {}, tol), IncrementPath::Exact);
  EXPECT_EQ(increment_path(0.01, {}, tol), IncrementPath::NormalAInfinity);
  const IncrementMode approx{IncrementKind::TangentApprox, 0.05};
  EXPECT_EQ(increment_path(0.01, approx, tol), IncrementPath::TangentGaussian);
  EXPECT_EQ(increment_path(0.5, approx, tol), IncrementPath::Exact);
}

TEST(SphereIncrement, Errors) {
  EXPECT_THROW(SphereIncrement(1, 0.5), std::invalid_argument);
  EXPECT_NO_THROW(SphereIncrement(1, 0.01, {IncrementKind::TangentApprox, 0.05}));
  EXPECT_THROW(SphereIncrement(3, 0.0), std::invalid_argument);
  Rng rng(23);
  const SphereIncrement inc(3, 0.5);
  EXPECT_THROW(inc(Eigen::RowVectorXd::Unit(3, 0), rng), ShapeError);
}

TEST(SphereIncrement, RadialFirstMoment) {
  Rng rng(24);
  const RadialSamples s = sample_radial(3, 0.5, 100000, rng);
  EXPECT_NEAR(std::exp(-0.75), 0.47236655274101470714, 1e-15);
  EXPECT_TRUE(check_cos_moment(3, 0.5, s).passed);
  EXPECT_TRUE(check_tan2_bound(3, 0.5, s).passed);
  EXPECT_TRUE(check_r2_comparison(3, 0.5, s).passed);
}

TEST(SphereIncrement, TangentIsotropyAboutStart) {
  Rng rng(25);
  const std::size_t d = 4;
  const Eigen::RowVectorXd z = random_unit_vector(d + 1, rng);
  const SphereIncrement inc(d, 0.3);
  const int draws = 50000;
  std::vector<RunningMoments> coords(d + 1);
  for (int s = 0; s < draws; ++s) {
    const Eigen::RowVectorXd w = inc(z, rng);
    const Eigen::RowVectorXd tangential = w - w.dot(z) * z;
    for (std::size_t j = 0; j <= d; ++j) {
      coords[j].add(tangential[static_cast<Eigen::Index>(j)]);
    }
  }
  for (const auto& c : coords) {
    EXPECT_LE(std::abs(c.mean), 3.5 * c.standard_error());
  }
}

TEST(SphereIncrement, TangentApproxSmallTime) {
  Rng rng(26);
  const std::size_t d = 3;
  const double t = 1e-3;
  const RadialSamples s =
      sample_radial(d, t, 50000, rng, {IncrementKind::TangentApprox, 0.05});
  EXPECT_EQ(s.path, IncrementPath::TangentGaussian);
  // Euclidean scaling: E r^2 ~ t d.
  EXPECT_NEAR(s.r2.mean / (t * d), 1.0, 0.03);
  EXPECT_GT(s.cos_r.mean, 0.99);
}

TEST(BrownianProduct, SingleFactorMatchesSphere) {
  const Eigen::RowVectorXd z = Eigen::RowVectorXd::Unit(4, 1);
  Factors f(1, 4);
  f.row(0) = z;
  const PointOnM x(f);
  const SphereIncrement inc(3, 0.4);
  Rng a(27);
  Rng b(27);
  const PointOnM y = brownian_increment_product(x, inc, a);
  EXPECT_EQ(Eigen::RowVectorXd(y.factors().row(0)), inc(z, b));
}

TEST(BrownianProduct, FactorsIndependent) {
  Rng rng(28);
  const PointOnM x = random_point({2, 3}, rng);
  const SphereIncrement inc(3, 0.5);
  const int draws = 10000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int s = 0; s < draws; ++s) {
    const PointOnM y = brownian_increment_product(x, inc, rng);
    EXPECT_LE(PointOnM::max_norm_error(y.factors()), 1e-12);
    const double a = unit_angle(x.factors().row(0), y.factors().row(0));
    const double b = unit_angle(x.factors().row(1), y.factors().row(1));
    sa += a;
    sb += b;
    sab += a * b;
    saa += a * a;
    sbb += b * b;
  }
  const double n = draws;
  const double cov = sab / n - sa / n * sb / n;
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LE(std::abs(corr), 3.0 / std::sqrt(n));
}

}  // namespace
}  // namespace sphere_langevin
