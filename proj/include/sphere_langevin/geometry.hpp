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

// Points and tangent vectors on the product manifold M = S^d x ... x S^d
// (n factors). A configuration is stored as an n x (d+1) row-major matrix
// whose rows are unit vectors.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>

#include "sphere_langevin/errors.hpp"

namespace sphere_langevin {

using Factors = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kUnitNormTol = 1e-10;
inline constexpr double kTangentTol = 1e-10;
inline constexpr double kCutLocusTol = 1e-12;

struct ManifoldShape {
  std::size_t n = 1;  // number of spheres
  std::size_t d = 1;  // sphere dimension

  std::size_t ambient() const noexcept { return d + 1; }

  void validate() const {
    if (n < 1 || d < 1) {
      throw std::invalid_argument("manifold shape requires n >= 1 and d >= 1");
    }
  }

  friend bool operator==(const ManifoldShape&, const ManifoldShape&) = default;
};

inline std::string to_string(const ManifoldShape& s) {
  return "(n=" + std::to_string(s.n) + ", d=" + std::to_string(s.d) + ")";
}

inline void require_same_shape(const ManifoldShape& a, const ManifoldShape& b, const char* op) {
  if (!(a == b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
  }
}

/// Angle between two unit vectors, stable at both 0 and pi.
template <typename A, typename B>
double unit_angle(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

class PointOnM {
 public:
  /// Validates that every row is unit norm within kUnitNormTol.
  explicit PointOnM(Factors rows) : rows_(std::move(rows)) {
    shape().validate();
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
      const double err = std::abs(rows_.row(i).norm() - 1.0);
      if (!(err <= kUnitNormTol)) {
        throw std::invalid_argument("PointOnM: factor " + std::to_string(i) +
                                    " is not unit norm (error " + std::to_string(err) + ")");
      }
    }
  }

  /// Rescales every row to unit norm. Rows of zero norm are rejected.
  static PointOnM normalized(Factors rows) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double nrm = rows.row(i).norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw std::invalid_argument("PointOnM: factor " + std::to_string(i) +
                                    " cannot be normalized");
      }
      rows.row(i) /= nrm;
    }
    return PointOnM(std::move(rows));
  }

  /// Largest deviation |‖x_i‖ - 1| over the factors.
  static double max_norm_error(const Factors& rows) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      worst = std::max(worst, std::abs(rows.row(i).norm() - 1.0));
    }
    return worst;
  }

  ManifoldShape shape() const noexcept {
    return {static_cast<std::size_t>(rows_.rows()),
            rows_.cols() > 0 ? static_cast<std::size_t>(rows_.cols() - 1) : 0};
  }
  std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t d() const noexcept { return shape().d; }

  const Factors& factors() const noexcept { return rows_; }
  auto factor(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }

 private:
  Factors rows_;
};

class TangentVector {
 public:
  /// Validates tangency of every row to the corresponding base factor.
  TangentVector(PointOnM base, Factors rows) : base_(std::move(base)), rows_(std::move(rows)) {
    if (rows_.rows() != base_.factors().rows() || rows_.cols() != base_.factors().cols()) {
      throw ShapeError("TangentVector: component matrix does not match base shape");
    }
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
      const double ip = rows_.row(i).dot(base_.factors().row(i));
      if (!(std::abs(ip) <= kTangentTol * std::max(1.0, rows_.row(i).norm()))) {
        throw std::invalid_argument("TangentVector: factor " + std::to_string(i) +
                                    " is not tangent to its base point");
      }
    }
  }

  static TangentVector zero(const PointOnM& base) {
    return TangentVector(base, Factors::Zero(base.factors().rows(), base.factors().cols()));
  }

  const PointOnM& base() const noexcept { return base_; }
  const Factors& factors() const noexcept { return rows_; }
  auto factor(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }
  ManifoldShape shape() const noexcept { return base_.shape(); }

  /// Riemannian (product) norm.
  double norm() const { return rows_.norm(); }
  double inner(const TangentVector& other) const {
    require_same_shape(shape(), other.shape(), "TangentVector::inner");
    return rows_.cwiseProduct(other.rows_).sum();
  }

  TangentVector scaled(double s) const { return TangentVector(base_, rows_ * s, Unchecked{}); }
  TangentVector operator-() const { return scaled(-1.0); }
  friend TangentVector operator*(double s, const TangentVector& v) { return v.scaled(s); }

 private:
  struct Unchecked {};
  TangentVector(PointOnM base, Factors rows, Unchecked)
      : base_(std::move(base)), rows_(std::move(rows)) {}

  friend TangentVector project_to_tangent(const PointOnM& x, const Factors& w);
  friend TangentVector log_map(const PointOnM& x, const PointOnM& y);

  PointOnM base_;
  Factors rows_;
};

/// Per-factor orthogonal projection w_i - <w_i, x_i> x_i.
inline TangentVector project_to_tangent(const PointOnM& x, const Factors& w) {
  if (w.rows() != x.factors().rows() || w.cols() != x.factors().cols()) {
    throw ShapeError("project_to_tangent: ambient vectors do not match point shape");
  }
  Factors out = w;
  const Factors& xs = x.factors();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) -= out.row(i).dot(xs.row(i)) * xs.row(i);
    // A second pass removes the O(eps * |w|) radial residue of the first.
    out.row(i) -= out.row(i).dot(xs.row(i)) * xs.row(i);
  }
  return TangentVector(x, std::move(out), TangentVector::Unchecked{});
}

/// exp(x, t v) per factor: x cos(t|v|) + (v/|v|) sin(t|v|).
inline PointOnM exp_map(const PointOnM& x, const TangentVector& v, double t) {
  require_same_shape(x.shape(), v.shape(), "exp_map");
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("exp_map: step length must be finite and non-negative");
  }
  Factors out = x.factors();
  const Factors& vs = v.factors();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double speed = vs.row(i).norm();
    if (speed == 0.0 || t == 0.0) {
      continue;
    }
    const double arc = t * speed;
    out.row(i) = out.row(i) * std::cos(arc) + vs.row(i) * (std::sin(arc) / speed);
    out.row(i) /= out.row(i).norm();
  }
  return PointOnM(std::move(out));
}

/// Inverse of exp_map per factor. Antipodal factors have no unique
/// minimizing geodesic and raise CutLocusError.
inline TangentVector log_map(const PointOnM& x, const PointOnM& y) {
  require_same_shape(x.shape(), y.shape(), "log_map");
  const Factors& xs = x.factors();
  const Factors& ys = y.factors();
  Factors out(xs.rows(), xs.cols());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double c = std::clamp(xs.row(i).dot(ys.row(i)), -1.0, 1.0);
    if (c <= -1.0 + kCutLocusTol) {
      throw CutLocusError("log_map: factor " + std::to_string(i) + " is antipodal");
    }
    Eigen::RowVectorXd w = ys.row(i) - c * xs.row(i);
    w -= w.dot(xs.row(i)) * xs.row(i);
    const double wn = w.norm();
    if (wn == 0.0) {
      out.row(i).setZero();
      continue;
    }
    out.row(i) = (unit_angle(xs.row(i), ys.row(i)) / wn) * w;
  }
  return TangentVector(x, std::move(out), TangentVector::Unchecked{});
}

/// Product-metric distance sqrt(sum_i angle(x_i, y_i)^2).
inline double geodesic_distance(const PointOnM& x, const PointOnM& y) {
  require_same_shape(x.shape(), y.shape(), "geodesic_distance");
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.factors().rows(); ++i) {
    const double a = unit_angle(x.factors().row(i), y.factors().row(i));
    sq += a * a;
  }
  return std::sqrt(sq);
}

/// Uniform point on S^k embedded in R^{k+1} (normalized Gaussian).
template <typename Urbg>
Eigen::RowVectorXd random_unit_vector(std::size_t ambient_dim, Urbg& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(ambient_dim));
  double nrm = 0.0;
  do {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      v[j] = normal(rng);
    }
    nrm = v.norm();
  } while (nrm == 0.0);
  return v / nrm;
}

/// Each factor independently uniform on S^d.
template <typename Urbg>
PointOnM random_point(const ManifoldShape& shape, Urbg& rng) {
  shape.validate();
  Factors rows(static_cast<Eigen::Index>(shape.n), static_cast<Eigen::Index>(shape.ambient()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    rows.row(i) = random_unit_vector(shape.ambient(), rng);
  }
  return PointOnM(std::move(rows));
}

}  // namespace sphere_langevin
