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

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sphere_langevin/geometry.hpp"

namespace sphere_langevin {

struct CostEntry {
  std::size_t i = 0;  // 0-based, i <= j
  std::size_t j = 0;
  double weight = 0.0;
};

/// Symmetric n x n matrix given by its upper triangle. Immutable after
/// construction; duplicate (i, j) pairs are rejected, not summed.
class SymmetricCostMatrix {
 public:
  SymmetricCostMatrix(std::size_t n, std::vector<CostEntry> entries)
      : n_(n), entries_(std::move(entries)), full_(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n)) {
    if (n < 1) {
      throw std::invalid_argument("SymmetricCostMatrix: n must be >= 1");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * entries_.size());
    for (auto& e : entries_) {
      if (e.i > e.j) {
        std::swap(e.i, e.j);
      }
      if (e.j >= n) {
        throw std::out_of_range("SymmetricCostMatrix: index " + std::to_string(e.j) +
                                " out of range for n=" + std::to_string(n));
      }
      if (!std::isfinite(e.weight)) {
        throw std::invalid_argument("SymmetricCostMatrix: non-finite weight");
      }
      if (!seen.emplace(e.i, e.j).second) {
        throw std::invalid_argument("SymmetricCostMatrix: duplicate entry (" +
                                    std::to_string(e.i) + ", " + std::to_string(e.j) + ")");
      }
      const auto r = static_cast<Eigen::Index>(e.i);
      const auto c = static_cast<Eigen::Index>(e.j);
      trips.emplace_back(r, c, e.weight);
      if (r != c) {
        trips.emplace_back(c, r, e.weight);
      }
    }
    full_.setFromTriplets(trips.begin(), trips.end());
    full_.makeCompressed();
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<CostEntry>& entries() const noexcept { return entries_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& sparse() const noexcept { return full_; }

  /// Max absolute row sum; an upper bound on the spectral norm.
  double norm_bound() const {
    double best = 0.0;
    for (Eigen::Index r = 0; r < full_.outerSize(); ++r) {
      double row = 0.0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(full_, r); it; ++it) {
        row += std::abs(it.value());
      }
      best = std::max(best, row);
    }
    return best;
  }

  /// Entrywise negation (A = -A_G).
  SymmetricCostMatrix negated() const {
    std::vector<CostEntry> neg = entries_;
    for (auto& e : neg) {
      e.weight = -e.weight;
    }
    return SymmetricCostMatrix(n_, std::move(neg));
  }

 private:
  std::size_t n_;
  std::vector<CostEntry> entries_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> full_;
};

/// F in C^2(M) with its ambient (Euclidean) gradient.
template <typename T>
concept Objective = requires(const T& f, const PointOnM& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.euclidean_gradient(x) } -> std::convertible_to<Factors>;
};

template <Objective F>
TangentVector riemannian_gradient(const F& f, const PointOnM& x) {
  return project_to_tangent(x, f.euclidean_gradient(x));
}

namespace detail {
inline void check_bm_shape(const SymmetricCostMatrix& a, const PointOnM& x, const char* op) {
  if (a.n() != x.n()) {
    throw ShapeError(std::string(op) + ": cost matrix has n=" + std::to_string(a.n()) +
                     " but point has n=" + std::to_string(x.n()));
  }
}
}  // namespace detail

/// Burer-Monteiro loss without its constant offset: F(x) = -<x, A x>.
inline double bm_value(const SymmetricCostMatrix& a, const PointOnM& x) {
  detail::check_bm_shape(a, x, "bm_value");
  const Factors ax = a.sparse() * x.factors();
  return -x.factors().cwiseProduct(ax).sum();
}

inline TangentVector bm_riemannian_grad(const SymmetricCostMatrix& a, const PointOnM& x) {
  detail::check_bm_shape(a, x, "bm_riemannian_grad");
  const Factors egrad = -2.0 * (a.sparse() * x.factors());
  return project_to_tangent(x, egrad);
}

/// Objective adapter over a cost matrix owned elsewhere.
class BurerMonteiroObjective {
 public:
  explicit BurerMonteiroObjective(const SymmetricCostMatrix& a) : a_(&a) {}

  const SymmetricCostMatrix& matrix() const noexcept { return *a_; }
  double value(const PointOnM& x) const { return bm_value(*a_, x); }
  Factors euclidean_gradient(const PointOnM& x) const {
    detail::check_bm_shape(*a_, x, "euclidean_gradient");
    return -2.0 * (a_->sparse() * x.factors());
  }

 private:
  const SymmetricCostMatrix* a_;
};

struct LipschitzEstimates {
  double K1 = 1.0;  // gradient bound
  double K2 = 1.0;  // Hessian bound
  double K3 = 1.0;  // third-derivative bound
};

/// Conservative constants from the operator-norm bound s = max abs row sum:
/// |grad F| <= 2 s sqrt(n), |Hess F| <= 4 s, |D^3 F| <= 6 s, each clamped at 1.
inline LipschitzEstimates lipschitz_estimates(const SymmetricCostMatrix& a,
                                              const ManifoldShape& shape) {
  shape.validate();
  if (shape.n != a.n()) {
    throw ShapeError("lipschitz_estimates: shape n does not match cost matrix");
  }
  const double s = a.norm_bound();
  const double n = static_cast<double>(shape.n);
  return {std::max(1.0, 2.0 * s * std::sqrt(n)), std::max(1.0, 4.0 * s), std::max(1.0, 6.0 * s)};
}

}  // namespace sphere_langevin
