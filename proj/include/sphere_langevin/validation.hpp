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

// Statistical checks of the Brownian and Wright-Fisher samplers.
//
// Moment oracles: Y_t = (1 - cos r_t)/2 solves
//   dY = (d/4)(1 - 2Y) dt + sqrt(Y(1-Y)) dB,
// so E[cos r_t] = exp(-d t / 2) from any start, and E[Y_t | Y_0 = 0] =
// (1 - exp(-d t / 2)) / 2.

#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sphere_langevin/brownian.hpp"
#include "sphere_langevin/wright_fisher.hpp"

namespace sphere_langevin {

struct CheckOutcome {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  double observed = 0.0;
  double expected = 0.0;  // target value, or upper bound for one-sided checks
  double standard_error = 0.0;
  double threshold = 0.0;  // allowed |observed - expected| or slack above the bound
  bool passed = false;
  std::string note;
};

struct RunningMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double standard_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

struct RadialSamples {
  RunningMoments cos_r;
  RunningMoments tan2_half;
  RunningMoments r2;
  IncrementPath path = IncrementPath::Exact;
};

/// N Brownian increments on S^d at time t from a fixed start; accumulates
/// cos r, tan^2(r/2) and r^2 of the displacement angle r.
template <typename Urbg>
RadialSamples sample_radial(std::size_t d, double t, std::size_t count, Urbg& rng,
                            const IncrementMode& mode = {}, const SeriesTolerances& tol = {}) {
  const SphereIncrement inc(d, t, mode, tol);
  const Eigen::RowVectorXd z = random_unit_vector(d + 1, rng);
  RadialSamples out;
  out.path = inc.path();
  for (std::size_t s = 0; s < count; ++s) {
    const Eigen::RowVectorXd w = inc(z, rng);
    const double c = std::clamp(z.dot(w), -1.0, 1.0);
    const double r = unit_angle(z, w);
    out.cos_r.add(c);
    out.tan2_half.add((1.0 - c) / (1.0 + c));
    out.r2.add(r * r);
  }
  return out;
}

inline CheckOutcome check_cos_moment(std::size_t d, double t, const RadialSamples& s) {
  CheckOutcome o;
  o.name = "radial_cos_moment";
  o.params = {{"d", static_cast<double>(d)}, {"t", t}, {"N", static_cast<double>(s.cos_r.count)}};
  o.observed = s.cos_r.mean;
  o.expected = std::exp(-static_cast<double>(d) * t / 2.0);
  o.standard_error = s.cos_r.standard_error();
  o.threshold = 3.0 * o.standard_error;
  o.passed = std::abs(o.observed - o.expected) <= o.threshold;
  o.note = std::string("|mean cos r - exp(-dt/2)| <= 3 SE; sampler path: ") + to_string(s.path);
  return o;
}

inline CheckOutcome check_tan2_bound(std::size_t d, double t, const RadialSamples& s) {
  CheckOutcome o;
  o.name = "tan2_half_angle_bound";
  o.params = {{"d", static_cast<double>(d)}, {"t", t}, {"N", static_cast<double>(s.tan2_half.count)}};
  o.observed = s.tan2_half.mean;
  o.expected = 2.0 * static_cast<double>(d) * t;
  o.standard_error = s.tan2_half.standard_error();
  o.threshold = 3.0 * o.standard_error;
  o.passed = o.observed <= o.expected + o.threshold;
  o.note = "mean tan^2(r/2) <= 2 d t + 3 SE";
  if (d < 3) {
    o.note += " (bound stated for d >= 3)";
  }
  return o;
}

inline CheckOutcome check_r2_comparison(std::size_t d, double t, const RadialSamples& s) {
  CheckOutcome o;
  o.name = "radial_r2_comparison";
  o.params = {{"d", static_cast<double>(d)}, {"t", t}, {"N", static_cast<double>(s.r2.count)}};
  o.observed = s.r2.mean;
  o.expected = static_cast<double>(d) * t;
  o.standard_error = s.r2.standard_error();
  o.threshold = 3.0 * o.standard_error;
  o.passed = o.observed <= o.expected + o.threshold;
  o.note = "mean r^2 <= d t + 3 SE (Euclidean comparison, t <= 0.5)";
  return o;
}

struct ChiSquareSummary {
  double statistic = 0.0;
  std::size_t bins = 0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed counts against pmf q (mass beyond the
/// table lumped into the last bin). Adjacent cells are pooled until each
/// expected count is at least 5.
inline ChiSquareSummary chi_square_gof(const std::vector<std::uint64_t>& counts,
                                       const std::vector<double>& q, std::size_t total) {
  const double n = static_cast<double>(total);
  std::vector<double> expected;
  std::vector<double> observed;
  double e_acc = 0.0;
  double o_acc = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    e_acc += q[m] * n;
    o_acc += m < counts.size() ? static_cast<double>(counts[m]) : 0.0;
    if (e_acc >= 5.0) {
      expected.push_back(e_acc);
      observed.push_back(o_acc);
      e_acc = 0.0;
      o_acc = 0.0;
    }
  }
  double table_mass = 0.0;
  for (double v : q) {
    table_mass += v;
  }
  e_acc += std::max(0.0, 1.0 - table_mass) * n;
  for (std::size_t m = q.size(); m < counts.size(); ++m) {
    o_acc += static_cast<double>(counts[m]);
  }
  if (!expected.empty()) {
    expected.back() += e_acc;
    observed.back() += o_acc;
  } else {
    expected.push_back(e_acc);
    observed.push_back(o_acc);
  }

  ChiSquareSummary s;
  s.bins = expected.size();
  for (std::size_t b = 0; b < expected.size(); ++b) {
    if (expected[b] > 0.0) {
      const double diff = observed[b] - expected[b];
      s.statistic += diff * diff / expected[b];
    }
  }
  s.dof = s.bins > 0 ? s.bins - 1 : 0;
  if (s.dof > 0) {
    const boost::math::chi_squared dist(static_cast<double>(s.dof));
    s.p_value = boost::math::cdf(boost::math::complement(dist, s.statistic));
  }
  return s;
}

template <typename Urbg>
CheckOutcome check_ainfty_gof(double theta, double t, std::size_t count, Urbg& rng,
                              double significance = 0.01, const SeriesTolerances& tol = {}) {
  const AInfinitySampler sampler(theta, t, tol);
  const std::vector<double> q = qm_table(theta, t, tol);
  std::vector<std::uint64_t> counts;
  for (std::size_t s = 0; s < count; ++s) {
    const std::uint64_t m = sampler(rng);
    if (m >= counts.size()) {
      counts.resize(m + 1, 0);
    }
    ++counts[m];
  }
  const ChiSquareSummary chi = chi_square_gof(counts, q, count);
  CheckOutcome o;
  o.name = "ainfty_chi_square";
  o.params = {{"theta", theta},
              {"t", t},
              {"N", static_cast<double>(count)},
              {"bins", static_cast<double>(chi.bins)},
              {"dof", static_cast<double>(chi.dof)}};
  o.observed = chi.statistic;
  o.expected = chi.p_value;
  o.threshold = significance;
  o.passed = chi.p_value >= significance;
  o.note = chi.dof == 0 ? "single pooled bin: test is vacuous at this sample size"
                        : "chi-square GOF of sampled A_inf vs truncated series pmf; "
                          "expected field holds the p-value";
  return o;
}

inline CheckOutcome check_qm_normalization(double theta, double t, double tolerance = 1e-4,
                                           const SeriesTolerances& tol = {}) {
  const std::vector<double> q = qm_table(theta, t, tol);
  double total = 0.0;
  for (double v : q) {
    total += v;
  }
  CheckOutcome o;
  o.name = "qm_normalization";
  o.params = {{"theta", theta}, {"t", t}, {"terms", static_cast<double>(q.size())}};
  o.observed = total;
  o.expected = 1.0;
  o.threshold = tolerance;
  o.passed = std::abs(total - 1.0) <= tolerance;
  o.note = "sum of q_m up to the tail cutoff";
  return o;
}

/// Integral of y^power f(y; t) over (0, 1) by tanh-sinh quadrature.
inline double integrate_density_moment(const WrightFisherDensity& f, int power) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(
      [&](double y) {
        if (!(y > 0.0 && y < 1.0)) {
          return 0.0;
        }
        return std::pow(y, power) * f(y);
      },
      0.0, 1.0);
}

inline std::vector<CheckOutcome> check_density(std::size_t d, double t, double tolerance = 1e-3,
                                               const SeriesTolerances& tol = {}) {
  const WrightFisherDensity f(d, t, tol);
  CheckOutcome norm;
  norm.name = "wf_density_normalization";
  norm.params = {{"d", static_cast<double>(d)}, {"t", t}};
  norm.observed = integrate_density_moment(f, 0);
  norm.expected = 1.0;
  norm.threshold = tolerance;
  norm.passed = std::abs(norm.observed - 1.0) <= tolerance;
  norm.note = "integral of the transition density from 0";

  CheckOutcome mean = norm;
  mean.name = "wf_density_first_moment";
  mean.observed = integrate_density_moment(f, 1);
  mean.expected = 0.5 * (1.0 - std::exp(-static_cast<double>(d) * t / 2.0));
  mean.passed = std::abs(mean.observed - mean.expected) <= tolerance;
  mean.note = "integral of y f(y; t) vs (1 - exp(-dt/2)) / 2";
  return {norm, mean};
}

}  // namespace sphere_langevin
