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

// Exact simulation of the Wright-Fisher diffusion WF_{x,t}(theta1, theta2).
//
// The law at time t is a Beta mixture driven by A_inf^theta(t), the number
// of surviving lineages of Kingman's coalescent with mutation. Its pmf is
//
//   q_m(t) = sum_{i >= 0} (-1)^i b_{m+i}(m),
//   b_k(m) = a_{km} exp(-k (k + theta - 1) t / 2),
//   a_{km} = (theta + 2k - 1) / (m! (k-m)!) * Gamma(theta + m + k - 1) / Gamma(theta + m).
//
// For each m the terms b_{m+i}(m) decrease once i passes an onset index
// C_m, after which partial sums bracket q_m. The sampler refines these
// brackets until a uniform draw is classified, so the returned integer is
// exact.

#pragma once

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphere_langevin/errors.hpp"

namespace sphere_langevin {

struct SeriesTolerances {
  double tail_tol = 1e-12;
  std::size_t max_terms = 1'000'000;
  double small_t_threshold = 0.05;

  void validate() const {
    if (!(tail_tol > 0.0) || max_terms < 1 || !(small_t_threshold > 0.0)) {
      throw std::invalid_argument(
          "SeriesTolerances: require tail_tol > 0, max_terms >= 1, small_t_threshold > 0");
    }
  }
};

struct WrightFisherParams {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double x0 = 0.0;
  double t = 1.0;

  double theta() const noexcept { return theta1 + theta2; }

  void validate() const {
    if (!(theta1 > 0.0) || !(theta2 > 0.0)) {
      throw std::invalid_argument("WrightFisherParams: mutation parameters must be positive");
    }
    if (!(x0 >= 0.0 && x0 <= 1.0)) {
      throw std::invalid_argument("WrightFisherParams: x0 must lie in [0, 1]");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("WrightFisherParams: t must be positive");
    }
  }
};

namespace detail {

using NoPromote = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

inline double log_gamma(double x) { return boost::math::lgamma(x, NoPromote()); }

inline void check_theta_t(double theta, double t) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("theta must be positive");
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("t must be positive");
  }
}

inline double log_factorial(std::uint64_t k) { return log_gamma(static_cast<double>(k) + 1.0); }

}  // namespace detail

/// log a^theta_{km}. a_{00} = 1 for every theta > 0 (continuous extension
/// of (theta - 1) Gamma(theta - 1) = Gamma(theta)).
inline double log_coefficient_a(std::uint64_t k, std::uint64_t m, double theta) {
  if (m > k) {
    throw std::invalid_argument("log_coefficient_a: requires m <= k (got k=" + std::to_string(k) +
                                ", m=" + std::to_string(m) + ")");
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("log_coefficient_a: theta must be positive");
  }
  if (k == 0) {
    return 0.0;
  }
  const double kd = static_cast<double>(k);
  const double md = static_cast<double>(m);
  return std::log(theta + 2.0 * kd - 1.0) + detail::log_gamma(theta + md + kd - 1.0) -
         detail::log_gamma(theta + md) - detail::log_factorial(m) - detail::log_factorial(k - m);
}

/// log b^{(t,theta)}_k(m) = log a_{km} - k (k + theta - 1) t / 2.
inline double log_coefficient_b(std::uint64_t k, std::uint64_t m, double t, double theta) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("log_coefficient_b: t must be positive");
  }
  const double kd = static_cast<double>(k);
  return log_coefficient_a(k, m, theta) - kd * (kd + theta - 1.0) * t / 2.0;
}

namespace detail {

using Quad = boost::multiprecision::cpp_bin_float_quad;

inline constexpr double kQuadEpsilon = 1.0e-34;

/// Successive terms b_{m+i}(m), i = 0, 1, ..., in 113-bit precision.
///
/// For small t the terms reach 1e11 and beyond while q_m itself is O(1), so
/// double precision loses every significant digit to cancellation. The
/// first term comes from log-Gamma; the rest follow the exact ratio
///   b_{k+1}/b_k = (theta+2k+1)/(theta+2k-1) (theta+m+k-1)/(k+1-m) e^{-(2k+theta) t/2}.
class SeriesTerms {
 public:
  SeriesTerms(std::uint64_t m, double t, double theta)
      : m_(m), k_(m), theta_(theta), decay_(boost::multiprecision::exp(Quad(-t))) {
    check_theta_t(theta, t);
    const Quad th(theta);
    const Quad md(static_cast<double>(m));
    if (m == 0) {
      term_ = Quad(1);
    } else {
      using boost::multiprecision::exp;
      using boost::multiprecision::log;
      const Quad log_a = log(th + 2 * md - 1) + boost::math::lgamma(th + 2 * md - 1) -
                         boost::math::lgamma(md + 1) - boost::math::lgamma(th + md);
      term_ = exp(log_a - md * (md + th - 1) * Quad(t) / 2);
    }
    // e^{-(2k + theta) t / 2} at k = m
    step_decay_ = boost::multiprecision::exp(-(2 * md + th) * Quad(t) / 2);
  }

  const Quad& current() const noexcept { return term_; }
  std::uint64_t index() const noexcept { return k_ - m_; }

  void advance() {
    const Quad th(theta_);
    const Quad k(static_cast<double>(k_));
    const Quad md(static_cast<double>(m_));
    if (k_ == 0) {
      // a_{10} / a_{00} = theta + 1; a_{00} is the theta-continuous value 1.
      term_ *= (th + 1) * step_decay_;
    } else {
      term_ *= (th + 2 * k + 1) / (th + 2 * k - 1) * (th + md + k - 1) / (k + 1 - md) * step_decay_;
    }
    step_decay_ *= decay_;
    ++k_;
  }

 private:
  std::uint64_t m_;
  std::uint64_t k_;
  double theta_;
  Quad decay_;
  Quad step_decay_;
  Quad term_;
};

}  // namespace detail

/// C^{t,theta}_m: first i >= 0 with b_{m+i+1}(m) < b_{m+i}(m). From there on
/// the terms of q_m's series decrease.
inline std::uint64_t decreasing_onset(std::uint64_t m, double t, double theta,
                                      std::size_t max_terms) {
  detail::SeriesTerms terms(m, t, theta);
  for (std::uint64_t i = 0; i < max_terms; ++i) {
    const detail::Quad prev = terms.current();
    terms.advance();
    if (terms.current() < prev) {
      return i;
    }
  }
  throw NumericalFailure("decreasing_onset: no decrease within max_terms for m=" +
                         std::to_string(m));
}

/// Truncated evaluation of q_m(t). Summation stops once the series is past
/// its onset index and the current term is below tail_tol; the dropped tail
/// is then bounded by tail_tol. Terms are summed in 113-bit precision, and a
/// series whose largest term would swamp even that precision is reported as
/// a NumericalFailure rather than returned.
inline double qm_pmf(double theta, double t, std::uint64_t m, const SeriesTolerances& tol = {}) {
  tol.validate();
  detail::check_theta_t(theta, t);
  if (t < tol.small_t_threshold) {
    throw std::domain_error("qm_pmf: t below small_t_threshold; the alternating series is "
                            "numerically unreliable there");
  }
  const std::uint64_t onset = decreasing_onset(m, t, theta, tol.max_terms);
  detail::SeriesTerms terms(m, t, theta);
  detail::Quad sum(0);
  detail::Quad largest(0);
  for (std::uint64_t i = 0; i < tol.max_terms; ++i, terms.advance()) {
    const detail::Quad& term = terms.current();
    sum += (i % 2 == 0) ? term : detail::Quad(-term);
    largest = std::max(largest, term);
    if (i >= onset && term < tol.tail_tol) {
      if (static_cast<double>(largest) * detail::kQuadEpsilon > tol.tail_tol) {
        throw NumericalFailure("qm_pmf: cancellation exceeds working precision for m=" +
                               std::to_string(m));
      }
      return std::clamp(static_cast<double>(sum), 0.0, 1.0);
    }
  }
  throw NumericalFailure("qm_pmf: series did not converge within max_terms for m=" +
                         std::to_string(m));
}

/// q_0, q_1, ... up to the tail cutoff: stops once at least half the mass is
/// accumulated and q_m has dropped below tail_tol while decreasing.
inline std::vector<double> qm_table(double theta, double t, const SeriesTolerances& tol = {}) {
  std::vector<double> q;
  double total = 0.0;
  for (std::uint64_t m = 0; m < tol.max_terms; ++m) {
    const double qm = qm_pmf(theta, t, m, tol);
    q.push_back(qm);
    total += qm;
    if (total >= 0.5 && qm < tol.tail_tol && (m == 0 || qm <= q[m - 1])) {
      return q;
    }
  }
  throw NumericalFailure("qm_table: tail cutoff not reached within max_terms");
}

struct NormalApprox {
  double mean = 0.0;
  double variance = 0.0;
};

/// Griffiths' small-t normal approximation of A_inf^theta(t).
inline NormalApprox ainfty_normal_approx(double theta, double t) {
  detail::check_theta_t(theta, t);
  const double beta = 0.5 * (theta - 1.0) * t;
  if (std::abs(beta) < 1e-12) {
    return {2.0 / t, 2.0 / (3.0 * t)};
  }
  const double eta = beta / std::expm1(beta);
  const double mean = 2.0 * eta / t;
  // (1 + eta/(eta+beta) - 2 eta) / beta^2, where eta/(eta+beta) = e^{-beta}.
  // The numerator is O(beta^2), so small beta uses its Taylor series.
  double ratio = 0.0;
  if (std::abs(beta) < 1e-2) {
    const double b = beta;
    ratio = 1.0 / 3.0 + b * (-1.0 / 6.0 + b * (2.0 / 45.0 + b * (-1.0 / 120.0 + b / 756.0)));
  } else {
    ratio = (1.0 + std::exp(-beta) - 2.0 * eta) / (beta * beta);
  }
  const double variance = mean * (eta + beta) * (eta + beta) * ratio;
  return {mean, std::max(variance, 0.0)};
}

namespace detail {

/// Unevaluated sum hi + lo carrying about 106 significant bits.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  static DoubleDouble from(const Quad& q) {
    const double hi = static_cast<double>(q);
    return {hi, static_cast<double>(q - Quad(hi))};
  }

  DoubleDouble operator-() const noexcept { return {-hi, -lo}; }

  friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) noexcept {
    const double s = a.hi + b.hi;
    const double bb = s - a.hi;
    const double err = (a.hi - (s - bb)) + (b.hi - bb);
    const double lo = err + a.lo + b.lo;
    const double hi = s + lo;
    return {hi, lo - (hi - s)};
  }
  friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) noexcept { return a + (-b); }
  DoubleDouble& operator+=(DoubleDouble b) noexcept { return *this = *this + b; }

  /// Sign of (this - u).
  int compare(double u) const noexcept {
    const double diff = (hi - u) + lo;
    return (diff > 0.0) - (diff < 0.0);
  }
};

}  // namespace detail

/// Draws from A_inf^theta(t). Exact (alternating-series bracketing) when
/// t >= small_t_threshold, otherwise a rounded normal approximation.
///
/// Terms b_{m+i}(m) for the bulk of the distribution are tabulated at
/// construction; the object is immutable afterwards and can be shared
/// across threads, each thread passing its own generator. Brackets are
/// accumulated in double-double arithmetic because for small t the
/// individual terms exceed q_m by ten or more orders of magnitude.
class AInfinitySampler {
 public:
  AInfinitySampler(double theta, double t, SeriesTolerances tol = {})
      : theta_(theta), t_(t), tol_(tol) {
    tol_.validate();
    detail::check_theta_t(theta, t);
    approx_ = ainfty_normal_approx(theta, t);
    if (t < tol_.small_t_threshold) {
      exact_ = false;
      reason_ = "t below small_t_threshold";
      return;
    }
    const auto m_hi = static_cast<std::uint64_t>(
        std::ceil(approx_.mean + 10.0 * std::sqrt(approx_.variance) + 10.0));
    onset_.reserve(m_hi + 1);
    terms_.reserve(m_hi + 1);
    double largest = 0.0;
    for (std::uint64_t m = 0; m <= m_hi; ++m) {
      const std::uint64_t onset = decreasing_onset(m, t_, theta_, tol_.max_terms);
      std::vector<detail::DoubleDouble> row;
      detail::SeriesTerms series(m, t_, theta_);
      for (std::uint64_t i = 0; i < kMaxCachedTerms; ++i, series.advance()) {
        const auto b = detail::DoubleDouble::from(series.current());
        row.push_back(b);
        largest = std::max(largest, b.hi);
        if (i > onset + 1 && b.hi < kNegligible) {
          break;
        }
      }
      onset_.push_back(onset);
      terms_.push_back(std::move(row));
    }
    if (largest * kDoubleDoubleEpsilon > 1e-3 * tol_.tail_tol) {
      exact_ = false;
      reason_ = "series cancellation exceeds working precision";
      onset_.clear();
      terms_.clear();
    }
  }

  double theta() const noexcept { return theta_; }
  double t() const noexcept { return t_; }
  bool exact() const noexcept { return exact_; }
  /// Why the normal approximation is used; empty when exact.
  const std::string& approximation_reason() const noexcept { return reason_; }

  template <typename Urbg>
  std::uint64_t operator()(Urbg& rng) const {
    using detail::DoubleDouble;
    if (!exact_) {
      std::normal_distribution<double> normal(approx_.mean, std::sqrt(approx_.variance));
      return static_cast<std::uint64_t>(std::max(0.0, std::round(normal(rng))));
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);

    // Per open index m': current k, and the partial sum over i = 0..2k.
    std::vector<std::uint64_t> k;
    std::vector<DoubleDouble> upper;
    std::size_t refinements = 0;

    auto open = [&](std::uint64_t m) {
      const std::uint64_t km = (onset(m) + 1) / 2;
      DoubleDouble s;
      for (std::uint64_t i = 0; i <= 2 * km; ++i) {
        const DoubleDouble b = term(m, i);
        s += (i % 2 == 0) ? b : -b;
      }
      k.push_back(km);
      upper.push_back(s);
    };

    std::uint64_t m = 0;
    open(0);
    for (;;) {
      DoubleDouble s_plus;
      DoubleDouble s_minus;
      auto recompute = [&] {
        s_plus = {};
        s_minus = {};
        for (std::uint64_t j = 0; j <= m; ++j) {
          s_plus += upper[j];
          s_minus += upper[j] - term(j, 2 * k[j] + 1);
        }
      };
      recompute();
      while (s_minus.compare(u) < 0 && s_plus.compare(u) > 0) {
        if (++refinements > tol_.max_terms) {
          throw NumericalFailure("sample_ainfty: brackets did not separate within max_terms");
        }
        for (std::uint64_t j = 0; j <= m; ++j) {
          upper[j] += term(j, 2 * k[j] + 2) - term(j, 2 * k[j] + 1);
          ++k[j];
        }
        recompute();
      }
      if (s_minus.compare(u) >= 0) {
        return m;
      }
      if (++m > tol_.max_terms) {
        throw NumericalFailure("sample_ainfty: no classification within max_terms values");
      }
      open(m);
    }
  }

 private:
  static constexpr std::uint64_t kMaxCachedTerms = 4096;
  static constexpr double kNegligible = 1e-300;
  static constexpr double kDoubleDoubleEpsilon = 1e-31;

  std::uint64_t onset(std::uint64_t m) const {
    return m < onset_.size() ? onset_[m] : decreasing_onset(m, t_, theta_, tol_.max_terms);
  }

  detail::DoubleDouble term(std::uint64_t m, std::uint64_t i) const {
    if (m < terms_.size()) {
      const auto& row = terms_[m];
      if (i < row.size()) {
        return row[i];
      }
      if (row.size() < kMaxCachedTerms) {
        return {};  // negligible
      }
    }
    detail::SeriesTerms series(m, t_, theta_);
    for (std::uint64_t j = 0; j < i; ++j) {
      series.advance();
    }
    return detail::DoubleDouble::from(series.current());
  }

  double theta_;
  double t_;
  SeriesTolerances tol_;
  bool exact_ = true;
  std::string reason_;
  NormalApprox approx_;
  std::vector<std::uint64_t> onset_;
  std::vector<std::vector<detail::DoubleDouble>> terms_;
};

template <typename Urbg>
std::uint64_t sample_ainfty(double theta, double t, const SeriesTolerances& tol, Urbg& rng) {
  return AInfinitySampler(theta, t, tol)(rng);
}

template <typename Urbg>
double sample_beta(double a, double b, Urbg& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  for (;;) {
    const double x = ga(rng);
    const double y = gb(rng);
    if (x + y > 0.0) {
      return x / (x + y);
    }
  }
}

/// WF_{x0,t}(theta1, theta2): M ~ A_inf(t), L ~ Binomial(M, x0),
/// Y ~ Beta(theta1 + L, theta2 + M - L).
class WrightFisherSampler {
 public:
  explicit WrightFisherSampler(WrightFisherParams params, SeriesTolerances tol = {})
      : params_((params.validate(), params)), ainf_(params.theta(), params.t, tol) {}

  const WrightFisherParams& params() const noexcept { return params_; }
  bool exact() const noexcept { return ainf_.exact(); }
  const std::string& approximation_reason() const noexcept { return ainf_.approximation_reason(); }

  template <typename Urbg>
  double operator()(Urbg& rng) const {
    const std::uint64_t m = ainf_(rng);
    std::uint64_t l = 0;
    if (params_.x0 >= 1.0) {
      l = m;
    } else if (params_.x0 > 0.0 && m > 0) {
      std::binomial_distribution<std::uint64_t> binom(m, params_.x0);
      l = binom(rng);
    }
    const double y = sample_beta(params_.theta1 + static_cast<double>(l),
                                 params_.theta2 + static_cast<double>(m - l), rng);
    return std::clamp(y, 0.0, 1.0);
  }

 private:
  WrightFisherParams params_;
  AInfinitySampler ainf_;
};

template <typename Urbg>
double sample_wf(const WrightFisherParams& params, const SeriesTolerances& tol, Urbg& rng) {
  return WrightFisherSampler(params, tol)(rng);
}

/// Transition density of WF(d/2, d/2) started at 0:
/// f(y; t) = sum_m q_m(t) y^{d/2-1} (1-y)^{d/2+m-1} / B(d/2, d/2+m).
class WrightFisherDensity {
 public:
  WrightFisherDensity(std::size_t d, double t, const SeriesTolerances& tol = {})
      : half_d_(0.5 * static_cast<double>(d)) {
    if (d < 2) {
      throw std::invalid_argument("wf_density_from_zero: requires d >= 2");
    }
    q_ = qm_table(static_cast<double>(d), t, tol);
    log_norm_.reserve(q_.size());
    for (std::size_t m = 0; m < q_.size(); ++m) {
      const double b = half_d_ + static_cast<double>(m);
      // log B(d/2, d/2 + m)
      log_norm_.push_back(detail::log_gamma(half_d_) + detail::log_gamma(b) -
                          detail::log_gamma(half_d_ + b));
    }
  }

  const std::vector<double>& mixture_weights() const noexcept { return q_; }

  double operator()(double y) const {
    if (!(y > 0.0 && y < 1.0)) {
      throw std::domain_error("wf_density_from_zero: y must lie in (0, 1)");
    }
    const double ly = std::log(y);
    const double l1y = std::log1p(-y);
    double f = 0.0;
    for (std::size_t m = 0; m < q_.size(); ++m) {
      if (q_[m] == 0.0) {
        continue;
      }
      const double lt = (half_d_ - 1.0) * ly + (half_d_ + static_cast<double>(m) - 1.0) * l1y -
                        log_norm_[m];
      f += q_[m] * std::exp(lt);
    }
    return f;
  }

 private:
  double half_d_;
  std::vector<double> q_;
  std::vector<double> log_norm_;
};

inline double wf_density_from_zero(double y, std::size_t d, double t,
                                   const SeriesTolerances& tol = {}) {
  return WrightFisherDensity(d, t, tol)(y);
}

}  // namespace sphere_langevin
