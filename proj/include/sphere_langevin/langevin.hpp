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

// Riemannian Langevin iteration on a product of spheres:
//
//   X^_{k+1} = exp(X_k, -eta grad F(X_k))
//   X_{k+1}  = W(X^_{k+1}, 2 eta / beta)
//
// where W(x, t) is an exact Brownian increment of horizon t started at x.

#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sphere_langevin/brownian.hpp"
#include "sphere_langevin/geometry.hpp"
#include "sphere_langevin/objective.hpp"
#include "sphere_langevin/random.hpp"

namespace sphere_langevin {

struct LangevinConfig {
  double eta = 0.01;
  double beta = 1.0;
  std::size_t iterations = 1000;
  IncrementMode mode{};
  std::size_t record_every = 1;
  SeriesTolerances tol{};

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw std::invalid_argument("LangevinConfig: eta must be positive");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw std::invalid_argument("LangevinConfig: beta must be positive");
    }
    if (iterations < 1) {
      throw std::invalid_argument("LangevinConfig: iterations must be >= 1");
    }
    if (record_every < 1) {
      throw std::invalid_argument("LangevinConfig: record_every must be >= 1");
    }
    mode.validate();
    tol.validate();
  }
};

struct ChainState {
  PointOnM position;
  std::size_t step_index = 0;
  double best_value = std::numeric_limits<double>::infinity();
  PointOnM best_position;
};

struct ChainRecord {
  std::size_t step = 0;
  double value = 0.0;
  double distance_moved = 0.0;  // geodesic distance from the previous iterate
};

struct RunReport {
  LangevinConfig config;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<ChainRecord> records;
  double best_value = 0.0;
  PointOnM best_position;
  PointOnM final_position;
  double wall_clock_seconds = 0.0;
  IncrementPath path = IncrementPath::Exact;

  bool exact() const noexcept { return path == IncrementPath::Exact; }
};

/// One iteration with a prepared increment sampler (horizon 2 eta / beta).
template <Objective F, typename Urbg>
PointOnM langevin_step(const F& f, const PointOnM& x, double eta, const SphereIncrement& noise,
                       Urbg& rng) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("langevin_step: eta must be positive");
  }
  const TangentVector grad = riemannian_gradient(f, x);
  const PointOnM drifted = exp_map(x, -grad, eta);
  return brownian_increment_product(drifted, noise, rng);
}

template <Objective F, typename Urbg>
PointOnM langevin_step(const F& f, const PointOnM& x, double eta, double beta,
                       const IncrementMode& mode, Urbg& rng, const SeriesTolerances& tol = {}) {
  const SphereIncrement noise(x.d(), langevin_time(eta, beta), mode, tol);
  return langevin_step(f, x, eta, noise, rng);
}

/// Runs `iterations` steps from x0. Values are recorded at step 0, every
/// record_every steps, and at the final step. The result is a pure function
/// of (rng seed/stream, config, f, x0) apart from wall_clock_seconds.
template <Objective F>
RunReport run_chain(const F& f, const PointOnM& x0, const LangevinConfig& config, Rng& rng) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const SphereIncrement noise(x0.d(), langevin_time(config.eta, config.beta), config.mode,
                              config.tol);

  RunReport report{config, rng.seed(), rng.stream(), {}, 0.0, x0, x0, 0.0, noise.path()};
  ChainState state{x0, 0, f.value(x0), x0};
  report.records.push_back({0, state.best_value, 0.0});

  for (std::size_t k = 1; k <= config.iterations; ++k) {
    PointOnM next = langevin_step(f, state.position, config.eta, noise, rng);
    if (k % config.record_every == 0 || k == config.iterations) {
      const double value = f.value(next);
      report.records.push_back({k, value, geodesic_distance(state.position, next)});
      if (value < state.best_value) {
        state.best_value = value;
        state.best_position = next;
      }
    }
    state.position = std::move(next);
    state.step_index = k;
  }

  report.best_value = state.best_value;
  report.best_position = state.best_position;
  report.final_position = state.position;
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

struct RgdResult {
  PointOnM point;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Riemannian gradient descent with Armijo backtracking. Never increases
/// the objective; returns the last accepted point when max_iters runs out
/// or the step underflows (converged = false).
template <Objective F>
RgdResult rgd_baseline(const F& f, const PointOnM& x0, double step, std::size_t max_iters,
                       double grad_tol) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("rgd_baseline: step must be positive");
  }
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-16;

  PointOnM x = x0;
  double value = f.value(x);
  TangentVector grad = riemannian_gradient(f, x);
  double gnorm = grad.norm();
  std::size_t it = 0;
  while (gnorm > grad_tol && it < max_iters) {
    double s = step;
    bool accepted = false;
    while (s >= kMinStep) {
      PointOnM trial = exp_map(x, -grad, s);
      const double tv = f.value(trial);
      if (tv <= value - kArmijo * s * gnorm * gnorm) {
        x = std::move(trial);
        value = tv;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      break;
    }
    ++it;
    grad = riemannian_gradient(f, x);
    gnorm = grad.norm();
  }
  return {x, value, gnorm, it, gnorm <= grad_tol};
}

}  // namespace sphere_langevin
