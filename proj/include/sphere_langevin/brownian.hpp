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

// Brownian motion increments on S^d and on products of spheres.
//
// All times here are standard-Brownian times (generator half the
// Laplace-Beltrami operator). Only langevin_time() converts a Langevin
// step size and inverse temperature into such a time.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include "sphere_langevin/geometry.hpp"
#include "sphere_langevin/wright_fisher.hpp"

namespace sphere_langevin {

enum class IncrementKind { Exact, TangentApprox };

inline const char* to_string(IncrementKind k) {
  return k == IncrementKind::Exact ? "exact" : "tangent-approx";
}

struct IncrementMode {
  IncrementKind kind = IncrementKind::Exact;
  double small_t_threshold = 0.05;

  void validate() const {
    if (!(small_t_threshold > 0.0)) {
      throw std::invalid_argument("IncrementMode: small_t_threshold must be positive");
    }
  }
};

/// How a given (t, mode, tol) combination is realized.
enum class IncrementPath {
  Exact,            // Wright-Fisher radial part with exact A_inf
  NormalAInfinity,  // Wright-Fisher radial part, A_inf from the small-t normal law
  TangentGaussian,  // tangent Gaussian pushed through exp
};

inline IncrementPath increment_path(double t, const IncrementMode& mode,
                                    const SeriesTolerances& tol) {
  if (mode.kind == IncrementKind::TangentApprox && t < mode.small_t_threshold) {
    return IncrementPath::TangentGaussian;
  }
  return t >= tol.small_t_threshold ? IncrementPath::Exact : IncrementPath::NormalAInfinity;
}

inline const char* to_string(IncrementPath p) {
  switch (p) {
    case IncrementPath::Exact:
      return "exact";
    case IncrementPath::NormalAInfinity:
      return "approximate: small-t normal approximation of A_inf";
    case IncrementPath::TangentGaussian:
      return "approximate: tangent Gaussian pushed through exp";
  }
  return "unknown";
}

/// Brownian horizon of one Langevin step: 2 eta / beta.
inline double langevin_time(double eta, double beta) {
  if (!(eta > 0.0) || !(beta > 0.0) || !std::isfinite(eta) || !std::isfinite(beta)) {
    throw std::invalid_argument("langevin_time: eta and beta must be positive");
  }
  return 2.0 * eta / beta;
}

/// Applies the Householder reflection O(z) = I - 2uu^T, u = (e_d - z)/|e_d - z|,
/// which maps the north pole e_d = (0, ..., 0, 1) to z. Within 1e-12 of the
/// pole the identity is used.
inline Eigen::RowVectorXd householder_to(const Eigen::RowVectorXd& z, const Eigen::RowVectorXd& v) {
  Eigen::RowVectorXd u = -z;
  u[u.size() - 1] += 1.0;
  const double nrm = u.norm();
  if (nrm < 1e-12) {
    return v;
  }
  u /= nrm;
  return v - 2.0 * u.dot(v) * u;
}

/// Brownian increment on one sphere at a fixed horizon. Holds the
/// precomputed radial sampler, so it is cheap to reuse across many draws.
class SphereIncrement {
 public:
  SphereIncrement(std::size_t d, double t, IncrementMode mode = {}, SeriesTolerances tol = {})
      : d_(d), t_(t), path_(IncrementPath::Exact) {
    mode.validate();
    tol.validate();
    if (d < 1) {
      throw std::invalid_argument("SphereIncrement: d must be >= 1");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("SphereIncrement: t must be positive");
    }
    path_ = increment_path(t, mode, tol);
    if (path_ != IncrementPath::TangentGaussian) {
      if (d < 2) {
        throw std::invalid_argument("SphereIncrement: exact sampling requires d >= 2");
      }
      const double half = 0.5 * static_cast<double>(d);
      radial_ = std::make_shared<const WrightFisherSampler>(WrightFisherParams{half, half, 0.0, t},
                                                            tol);
      if (!radial_->exact()) {
        path_ = IncrementPath::NormalAInfinity;
      }
    }
  }

  std::size_t d() const noexcept { return d_; }
  double t() const noexcept { return t_; }
  IncrementPath path() const noexcept { return path_; }
  bool exact() const noexcept { return path_ == IncrementPath::Exact; }

  template <typename Urbg>
  Eigen::RowVectorXd operator()(const Eigen::RowVectorXd& z, Urbg& rng) const {
    if (static_cast<std::size_t>(z.size()) != d_ + 1) {
      throw ShapeError("brownian_increment_sphere: expected a vector of length d+1");
    }
    if (path_ == IncrementPath::TangentGaussian) {
      return tangent_step(z, rng);
    }
    const double x = (*radial_)(rng);
    const Eigen::RowVectorXd dir = random_unit_vector(d_, rng);
    Eigen::RowVectorXd v(static_cast<Eigen::Index>(d_ + 1));
    v.head(static_cast<Eigen::Index>(d_)) = 2.0 * std::sqrt(x * (1.0 - x)) * dir;
    v[static_cast<Eigen::Index>(d_)] = 1.0 - 2.0 * x;
    Eigen::RowVectorXd out = householder_to(z, v);
    return out / out.norm();
  }

 private:
  template <typename Urbg>
  Eigen::RowVectorXd tangent_step(const Eigen::RowVectorXd& z, Urbg& rng) const {
    std::normal_distribution<double> normal(0.0, std::sqrt(t_));
    Eigen::RowVectorXd g(z.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      g[j] = normal(rng);
    }
    g -= g.dot(z) * z;
    const double speed = g.norm();
    if (speed == 0.0) {
      return z;
    }
    Eigen::RowVectorXd out = z * std::cos(speed) + g * (std::sin(speed) / speed);
    return out / out.norm();
  }

  std::size_t d_;
  double t_;
  IncrementPath path_;
  std::shared_ptr<const WrightFisherSampler> radial_;
};

template <typename Urbg>
Eigen::RowVectorXd brownian_increment_sphere(const Eigen::RowVectorXd& z, double t,
                                             const IncrementMode& mode,
                                             const SeriesTolerances& tol, Urbg& rng) {
  if (std::abs(z.norm() - 1.0) > kUnitNormTol) {
    throw std::invalid_argument("brownian_increment_sphere: z must be a unit vector");
  }
  if (z.size() < 2) {
    throw ShapeError("brownian_increment_sphere: need at least S^1");
  }
  return SphereIncrement(static_cast<std::size_t>(z.size() - 1), t, mode, tol)(z, rng);
}

/// n independent sphere increments, one per factor, in factor order.
template <typename Urbg>
PointOnM brownian_increment_product(const PointOnM& x, const SphereIncrement& inc, Urbg& rng) {
  if (x.d() != inc.d()) {
    throw ShapeError("brownian_increment_product: sphere dimension mismatch");
  }
  Factors out(x.factors().rows(), x.factors().cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = inc(Eigen::RowVectorXd(x.factors().row(i)), rng);
  }
  return PointOnM(std::move(out));
}

template <typename Urbg>
PointOnM brownian_increment_product(const PointOnM& x, double t, const IncrementMode& mode,
                                    const SeriesTolerances& tol, Urbg& rng) {
  return brownian_increment_product(x, SphereIncrement(x.d(), t, mode, tol), rng);
}

}  // namespace sphere_langevin
