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

// Closed-form parameter prescriptions for the Langevin algorithm:
// inverse temperature, LSI constant, step size, iteration count and the
// finite-iteration KL bound. Products of large constants are evaluated in
// long double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphere_langevin {

struct TheoryInputs {
  std::size_t n = 1;
  std::size_t d = 3;
  double eps = 0.5;
  double delta = 0.1;
  double K1 = 1.0;
  double K2 = 1.0;
  double K3 = 1.0;
  double lambda_min = 1.0;
  double lambda_tilde = 1.0;
  double H0 = 10.0;
  std::optional<double> alpha_override;

  void validate() const {
    if (n < 1 || d < 1) {
      throw std::invalid_argument("TheoryInputs: n and d must be >= 1");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw std::invalid_argument("TheoryInputs: eps must lie in (0, 1]");
    }
    if (!(delta > 0.0 && delta < 0.5)) {
      throw std::invalid_argument("TheoryInputs: delta must lie in (0, 1/2)");
    }
    if (!(K1 >= 1.0) || !(K2 >= 1.0) || !(K3 >= 1.0)) {
      throw std::invalid_argument("TheoryInputs: K1, K2, K3 must be >= 1");
    }
    if (!(lambda_min > 0.0) || !(lambda_tilde > 0.0)) {
      throw std::invalid_argument("TheoryInputs: lambda_min and lambda_tilde must be positive");
    }
    if (!(H0 > 0.0)) {
      throw std::invalid_argument("TheoryInputs: H0 must be positive");
    }
    if (alpha_override && !(*alpha_override > 0.0)) {
      throw std::invalid_argument("TheoryInputs: alpha_override must be positive");
    }
  }
};

template <typename T>
struct Planned {
  T value{};
  std::vector<std::string> warnings;
};

namespace detail {
using ld = long double;
inline ld nd(const TheoryInputs& in) {
  return static_cast<ld>(in.n) * static_cast<ld>(in.d);
}
}  // namespace detail

/// Minimal inverse temperature for an eps-optimal Gibbs sample with
/// probability 1 - delta: (3nd/eps) log(n K2 / (eps delta)).
inline double plan_beta(const TheoryInputs& in) {
  in.validate();
  using detail::ld;
  const ld e = in.eps;
  return static_cast<double>(3.0L * detail::nd(in) / e *
                             std::log(static_cast<ld>(in.n) * in.K2 / (e * in.delta)));
}

/// LSI constant of the Burer-Monteiro Gibbs measure:
/// 1/alpha = 3395 K2 n beta max(lmin^-2, 1) max(lt^-2, lt^-1/2).
inline double lsi_alpha(const TheoryInputs& in, double beta) {
  in.validate();
  if (!(beta > 0.0)) {
    throw std::invalid_argument("lsi_alpha: beta must be positive");
  }
  if (in.alpha_override) {
    return *in.alpha_override;
  }
  using detail::ld;
  const ld lmin = in.lambda_min;
  const ld lt = in.lambda_tilde;
  const ld inv = 3395.0L * in.K2 * static_cast<ld>(in.n) * beta *
                 std::max(1.0L / (lmin * lmin), 1.0L) *
                 std::max(1.0L / (lt * lt), 1.0L / std::sqrt(lt));
  return static_cast<double>(1.0L / inv);
}

/// eta = min{1, 1/alpha, alpha delta^2 / (22 nd K1^2 K2^2 beta)}.
inline double plan_eta(const TheoryInputs& in, double alpha, double beta) {
  in.validate();
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("plan_eta: alpha and beta must be positive");
  }
  using detail::ld;
  const ld k12 = static_cast<ld>(in.K1) * in.K1 * in.K2 * in.K2;
  const ld third = static_cast<ld>(alpha) * in.delta * in.delta /
                   (22.0L * detail::nd(in) * k12 * beta);
  return static_cast<double>(std::min({1.0L, 1.0L / alpha, third}));
}

/// k = ceil((66/(eps delta^2)) max(1, alpha^-2) (nd K1 K2)^2
///          log(n K2/(eps delta)) log(H0/delta^2)).
/// The result can exceed 2^64, so it is an integral-valued double. When
/// H0 <= delta^2 the initialization already meets the target: k = 1.
inline Planned<double> plan_iterations(const TheoryInputs& in, double alpha) {
  in.validate();
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("plan_iterations: alpha must be positive");
  }
  using detail::ld;
  const ld d2 = static_cast<ld>(in.delta) * in.delta;
  if (!(in.H0 > d2)) {
    return {1.0, {"H0 <= delta^2: initial KL already within target, iteration count set to 1"}};
  }
  const ld e = in.eps;
  const ld a = alpha;
  const ld ndk = detail::nd(in) * in.K1 * in.K2;
  const ld k = 66.0L / (e * d2) * std::max(1.0L, 1.0L / (a * a)) * ndk * ndk *
               std::log(static_cast<ld>(in.n) * in.K2 / (e * in.delta)) * std::log(in.H0 / d2);
  return {static_cast<double>(std::max(1.0L, std::ceil(k))), {}};
}

/// H(rho_k) <= H0 e^{-alpha k eta} + 22 nd K1^2 K2^2 eta beta / alpha.
/// Violating eta <= min(1, 1/alpha) or beta >= 1 only produces warnings.
inline Planned<double> kl_bound(double k, double eta, double alpha, double beta, std::size_t n,
                                std::size_t d, double K1, double K2, double H0) {
  using ld = long double;
  Planned<double> out;
  if (!(eta <= std::min(1.0, 1.0 / alpha))) {
    out.warnings.emplace_back("eta exceeds min(1, 1/alpha); the bound's hypotheses fail");
  }
  if (!(beta >= 1.0)) {
    out.warnings.emplace_back("beta < 1; the bound's hypotheses fail");
  }
  const ld ndl = static_cast<ld>(n) * static_cast<ld>(d);
  const ld decay = static_cast<ld>(H0) * std::exp(-static_cast<ld>(alpha) * k * eta);
  const ld floor_term = 22.0L * ndl * K1 * K1 * K2 * K2 * eta * beta / alpha;
  out.value = static_cast<double>(decay + floor_term);
  return out;
}

/// Conditions under which the LSI constant above is valid:
///   a^2 >= 6 K2 nd / C_F^2,
///   beta >= max(a^2 4 K3^2 / lmin^2, a^2 (K3 + 2 K2)^2, 24 K2 nd log(6 K2 nd)).
/// C_F is not computable for general cost matrices, so it is supplied by the
/// caller; without it only the a-free part of the beta condition is checked.
struct LsiFeasibility {
  std::optional<double> C_F;
  std::optional<double> a2;
  std::optional<double> a2_min;
  std::optional<bool> a2_ok;
  double beta_min = 0.0;
  bool beta_ok = false;
  bool complete = false;  // all conditions were evaluable
};

inline LsiFeasibility lsi_feasibility(const TheoryInputs& in, double beta,
                                      std::optional<double> C_F, std::optional<double> a2) {
  in.validate();
  using detail::ld;
  LsiFeasibility f;
  f.C_F = C_F;
  const ld ndl = detail::nd(in);
  if (C_F) {
    if (!(*C_F > 0.0)) {
      throw std::invalid_argument("lsi_feasibility: C_F must be positive");
    }
    f.a2_min = static_cast<double>(6.0L * in.K2 * ndl / (static_cast<ld>(*C_F) * *C_F));
    if (!a2) {
      a2 = f.a2_min;
    }
  }
  f.a2 = a2;
  if (a2 && f.a2_min) {
    f.a2_ok = *a2 >= *f.a2_min;
  }
  ld bmin = 24.0L * in.K2 * ndl * std::log(6.0L * in.K2 * ndl);
  if (a2) {
    const ld lm = in.lambda_min;
    bmin = std::max({bmin, static_cast<ld>(*a2) * 4.0L * in.K3 * in.K3 / (lm * lm),
                     static_cast<ld>(*a2) * (in.K3 + 2.0L * in.K2) * (in.K3 + 2.0L * in.K2)});
  }
  f.beta_min = static_cast<double>(bmin);
  f.beta_ok = beta >= f.beta_min;
  f.complete = a2.has_value() && f.a2_min.has_value();
  return f;
}

struct PracticalOptions {
  double eta_scale = 0.5;       // eta = eta_scale / K2
  std::size_t iterations = 2000;
};

struct PracticalPreset {
  double beta = 0.0;
  double eta = 0.0;
  std::size_t iterations = 0;
  double brownian_time = 0.0;
};

struct TheoryPlan {
  TheoryInputs inputs;
  double beta = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double iterations_k = 0.0;
  double kl_bound_at_k = 0.0;
  PracticalPreset practical;
  std::optional<LsiFeasibility> feasibility;
  std::map<std::string, std::string> provenance;
  std::vector<std::string> warnings;
};

/// Prescribed beta at the requested eps with a gradient-Lipschitz step and a
/// user-chosen iteration budget; the prescribed eta and k are far too
/// conservative to run at desk scale.
inline PracticalPreset practical_preset(const TheoryInputs& in, const PracticalOptions& opts = {}) {
  if (!(opts.eta_scale > 0.0) || opts.iterations < 1) {
    throw std::invalid_argument("practical_preset: eta_scale > 0 and iterations >= 1 required");
  }
  PracticalPreset p;
  p.beta = plan_beta(in);
  p.eta = std::min(1.0, opts.eta_scale / in.K2);
  p.iterations = opts.iterations;
  p.brownian_time = 2.0 * p.eta / p.beta;
  return p;
}

inline TheoryPlan make_plan(const TheoryInputs& in, const PracticalOptions& opts = {},
                            std::optional<double> C_F = std::nullopt,
                            std::optional<double> a2 = std::nullopt) {
  in.validate();
  TheoryPlan plan;
  plan.inputs = in;
  plan.beta = plan_beta(in);
  plan.alpha = lsi_alpha(in, plan.beta);
  plan.eta = plan_eta(in, plan.alpha, plan.beta);
  auto iters = plan_iterations(in, plan.alpha);
  plan.iterations_k = iters.value;
  auto kl = kl_bound(plan.iterations_k, plan.eta, plan.alpha, plan.beta, in.n, in.d, in.K1, in.K2,
                     in.H0);
  plan.kl_bound_at_k = kl.value;
  plan.practical = practical_preset(in, opts);
  if (C_F || a2) {
    plan.feasibility = lsi_feasibility(in, plan.beta, C_F, a2);
  }

  plan.provenance = {
      {"beta", "Gibbs suboptimality bound: beta = (3nd/eps) log(n K2 / (eps delta))"},
      {"alpha", in.alpha_override
                    ? std::string("user override")
                    : std::string("Burer-Monteiro LSI constant: 1/alpha = 3395 K2 n beta "
                                  "max(lambda_min^-2, 1) max(lambda_tilde^-2, lambda_tilde^-1/2)")},
      {"eta", "Runtime complexity corollary: eta = min{1, 1/alpha, alpha delta^2 / "
              "(22 nd K1^2 K2^2 beta)}"},
      {"iterations_k", "Runtime complexity corollary: k = ceil(66/(eps delta^2) max(1, "
                       "alpha^-2) (nd K1 K2)^2 log(n K2/(eps delta)) log(H0/delta^2))"},
      {"kl_bound_at_k", "Finite iteration KL divergence bound: H0 e^{-alpha k eta} + 22 nd "
                        "K1^2 K2^2 eta beta / alpha"},
      {"practical", "practical preset: beta as prescribed, eta = eta_scale / K2, "
                    "user-chosen iterations; not covered by the convergence guarantee"},
      {"K1,K2,K3", "conservative bounds from the max-abs-row-sum operator norm, or user input"},
      {"lambda_min,lambda_tilde", "user input (default 1): Hessian spectra at unknown critical "
                                  "points are not computable a priori"},
      {"H0", "user input (default 10): no closed-form KL bound for uniform initialization"},
  };
  if (in.d < 3) {
    plan.warnings.emplace_back("d < 3: the convergence and Gibbs bounds assume d >= 3");
  }
  for (auto& w : iters.warnings) {
    plan.warnings.push_back(std::move(w));
  }
  for (auto& w : kl.warnings) {
    plan.warnings.push_back(std::move(w));
  }
  return plan;
}

}  // namespace sphere_langevin
