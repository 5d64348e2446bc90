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

// sphere_langevin: solve, plan, validate-sampler, brute.
//
// Exit codes: 0 ok, 1 validation failure, 2 usage or input error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sphere_langevin/sphere_langevin.hpp"

namespace {

using nlohmann::ordered_json;
namespace sl = sphere_langevin;

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kUsageError = 2;
constexpr int kNumericFailure = 3;

// Chain c draws its start from split(c).split(0), runs on split(c).split(1)
// and rounds on split(c).split(2).
enum Substream : std::uint64_t { kInit = 0, kChain = 1, kRounding = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

sl::GraphInstance load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open graph file: " + path);
  }
  return sl::parse_graph(in);
}

void emit(const ordered_json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw UsageError("cannot write report: " + path);
  }
  out << text;
}

ordered_json to_json(const sl::CheckOutcome& c) {
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : c.params) {
    params[k] = v;
  }
  return {{"name", c.name},         {"params", params},
          {"observed", c.observed}, {"expected", c.expected},
          {"standard_error", c.standard_error}, {"threshold", c.threshold},
          {"passed", c.passed},     {"note", c.note}};
}

ordered_json to_json(const sl::PointOnM& x) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < x.factors().rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < x.factors().cols(); ++j) {
      row.push_back(x.factors()(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json to_json(const sl::CutResult& c) {
  ordered_json signs = ordered_json::array();
  for (int s : c.cut.signs) {
    signs.push_back(s);
  }
  return {{"value", c.value}, {"signs", signs}};
}

ordered_json to_json(const sl::CutReport& r) {
  ordered_json j = {{"quadratic_value", r.quadratic_value},
                    {"relaxed_cut", r.relaxed_cut},
                    {"total_weight", r.total_weight},
                    {"gw_samples", r.samples},
                    {"rounded", to_json(r.rounded)}};
  j["optimum"] = r.optimum ? to_json(*r.optimum) : ordered_json(nullptr);
  j["rounded_ratio"] = r.rounded_ratio ? ordered_json(*r.rounded_ratio) : ordered_json(nullptr);
  return j;
}

ordered_json to_json(const sl::TheoryInputs& in) {
  ordered_json j = {{"n", in.n},
                    {"d", in.d},
                    {"eps", in.eps},
                    {"delta", in.delta},
                    {"K1", in.K1},
                    {"K2", in.K2},
                    {"K3", in.K3},
                    {"lambda_min", in.lambda_min},
                    {"lambda_tilde", in.lambda_tilde},
                    {"H0", in.H0}};
  j["alpha_override"] = in.alpha_override ? ordered_json(*in.alpha_override) : ordered_json(nullptr);
  return j;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

sl::IncrementMode parse_mode(const std::string& kind, double threshold) {
  sl::IncrementMode mode;
  mode.kind = kind == "approx" ? sl::IncrementKind::TangentApprox : sl::IncrementKind::Exact;
  mode.small_t_threshold = threshold;
  return mode;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string graph;
  std::size_t d = 3;
  std::optional<double> eta;
  std::optional<double> beta;
  double eps = 0.01;
  double delta = 0.1;
  double eta_scale = 0.5;
  std::size_t iters = 2000;
  std::uint64_t seed = 0;
  std::size_t gw_samples = 64;
  std::size_t record_every = 10;
  std::size_t chains = 1;
  std::string mode = "exact";
  double threshold = 0.05;
  bool rgd = false;
  std::string report;
  std::string trajectory_csv;
};

struct ChainOutcome {
  sl::RunReport run;
  sl::CutReport cut;
};

int cmd_solve(const SolveOptions& o) {
  const sl::GraphInstance g = load_graph(o.graph);
  const sl::SymmetricCostMatrix a = g.bm_cost();
  const sl::BurerMonteiroObjective f(a);
  const sl::ManifoldShape shape{g.n(), o.d};
  shape.validate();
  const sl::LipschitzEstimates lip = sl::lipschitz_estimates(a, shape);

  sl::TheoryInputs in;
  in.n = g.n();
  in.d = o.d;
  in.eps = o.eps;
  in.delta = o.delta;
  in.K1 = lip.K1;
  in.K2 = lip.K2;
  in.K3 = lip.K3;
  const sl::PracticalPreset preset =
      sl::practical_preset(in, {o.eta_scale, o.iters});

  sl::LangevinConfig cfg;
  cfg.eta = o.eta.value_or(preset.eta);
  cfg.beta = o.beta.value_or(preset.beta);
  cfg.iterations = o.iters;
  cfg.record_every = o.record_every;
  cfg.mode = parse_mode(o.mode, o.threshold);
  cfg.validate();
  if (o.chains < 1 || o.gw_samples < 1) {
    throw UsageError("--chains and --gw-samples must be >= 1");
  }

  const auto started = std::chrono::steady_clock::now();
  const sl::Rng root(o.seed);
  std::vector<std::future<ChainOutcome>> jobs;
  for (std::size_t c = 0; c < o.chains; ++c) {
    jobs.push_back(std::async(std::launch::async, [&, c] {
      const sl::Rng chain_root = root.split(c);
      sl::Rng init = chain_root.split(kInit);
      sl::Rng chain = chain_root.split(kChain);
      sl::Rng rounding = chain_root.split(kRounding);
      const sl::PointOnM x0 = sl::random_point(shape, init);
      sl::RunReport run = sl::run_chain(f, x0, cfg, chain);
      sl::CutReport cut = sl::bm_cut_report(g, run.best_position, o.gw_samples, rounding);
      return ChainOutcome{std::move(run), std::move(cut)};
    }));
  }
  std::vector<ChainOutcome> outcomes;
  for (auto& j : jobs) {
    outcomes.push_back(j.get());
  }

  ordered_json warnings = ordered_json::array();
  ordered_json chains = ordered_json::array();
  std::size_t best = 0;
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    const auto& [run, cut] = outcomes[c];
    if (cut.rounded.value > outcomes[best].cut.rounded.value) {
      best = c;
    }
    ordered_json records = ordered_json::array();
    for (const auto& r : run.records) {
      records.push_back({r.step, r.value, r.distance_moved});
    }
    chains.push_back({{"chain", c},
                      {"stream", run.stream},
                      {"sampler_path", sl::to_string(run.path)},
                      {"exact_sampling", run.exact()},
                      {"best_value", run.best_value},
                      {"final_value", run.records.back().value},
                      {"best_position", to_json(run.best_position)},
                      {"records_columns", {"step", "value", "distance_moved"}},
                      {"records", records},
                      {"cut", to_json(cut)}});
  }
  if (!outcomes.front().run.exact()) {
    warnings.push_back(std::string("Brownian increments are approximate: ") +
                       sl::to_string(outcomes.front().run.path));
  }

  ordered_json results = {{"n", g.n()},
                          {"m", g.m()},
                          {"lipschitz", {{"K1", lip.K1}, {"K2", lip.K2}, {"K3", lip.K3}}},
                          {"brownian_time", sl::langevin_time(cfg.eta, cfg.beta)},
                          {"best_chain", best},
                          {"best_cut", outcomes[best].cut.rounded.value},
                          {"best_value", outcomes[best].run.best_value},
                          {"chains", chains}};
  if (o.rgd) {
    sl::Rng init = root.split(0).split(kInit);
    const sl::PointOnM x0 = sl::random_point(shape, init);
    const sl::RgdResult r = sl::rgd_baseline(f, x0, cfg.eta, 100000, 1e-10);
    results["rgd"] = {{"value", r.value},
                      {"grad_norm", r.grad_norm},
                      {"iterations", r.iterations},
                      {"converged", r.converged}};
    if (!r.converged) {
      warnings.push_back("rgd baseline stopped before reaching the gradient tolerance");
    }
  }
  if ((o.d + 1) * (o.d + 2) / 2 <= g.n()) {
    warnings.push_back("(d+1)(d+2)/2 <= n: second-order critical points need not be global");
  }
  results["timing"] = {
      {"wall_clock_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()},
      {"timestamp", utc_timestamp()}};

  ordered_json config = {{"command", "solve"},
                         {"graph", o.graph},
                         {"d", o.d},
                         {"eta", cfg.eta},
                         {"beta", cfg.beta},
                         {"iters", cfg.iterations},
                         {"eps", o.eps},
                         {"delta", o.delta},
                         {"eta_scale", o.eta_scale},
                         {"gw_samples", o.gw_samples},
                         {"record_every", cfg.record_every},
                         {"chains", o.chains},
                         {"mode", o.mode},
                         {"small_t_threshold", o.threshold}};
  ordered_json provenance = {
      {"eta", o.eta ? "user" : "practical preset: eta_scale / K2"},
      {"beta", o.beta ? "user" : "Gibbs suboptimality bound at the requested eps, delta"},
      {"lipschitz", "conservative bounds from the max-abs-row-sum operator norm"},
      {"initialization", "uniform random point on the product of spheres"},
      {"streams", "chain c: split(c); start split(c).split(0), chain split(c).split(1), "
                  "rounding split(c).split(2)"},
      {"rounding", "best of gw_samples random hyperplanes"},
      {"rgd", "gradient descent with Armijo backtracking from chain 0's start"}};

  ordered_json report = {{"config", config},
                         {"seed", o.seed},
                         {"results", results},
                         {"provenance", provenance},
                         {"warnings", warnings}};
  emit(report, o.report);

  if (!o.trajectory_csv.empty()) {
    std::ofstream csv(o.trajectory_csv);
    if (!csv) {
      throw UsageError("cannot write trajectory CSV: " + o.trajectory_csv);
    }
    csv << "chain,step,value,distance_moved\n" << std::setprecision(17);
    for (std::size_t c = 0; c < outcomes.size(); ++c) {
      for (const auto& r : outcomes[c].run.records) {
        csv << c << ',' << r.step << ',' << r.value << ',' << r.distance_moved << '\n';
      }
    }
  }
  return kOk;
}

// ----------------------------------------------------------------- plan

struct PlanOptions {
  sl::TheoryInputs in;
  std::string graph;
  std::optional<double> alpha;
  std::optional<double> cf;
  std::optional<double> a2;
  double eta_scale = 0.5;
  std::size_t iters = 2000;
  std::string report;
};

int cmd_plan(PlanOptions o) {
  ordered_json warnings = ordered_json::array();
  if (!o.graph.empty()) {
    const sl::GraphInstance g = load_graph(o.graph);
    const sl::SymmetricCostMatrix a = g.bm_cost();
    o.in.n = g.n();
    const sl::LipschitzEstimates lip = sl::lipschitz_estimates(a, {o.in.n, o.in.d});
    o.in.K1 = lip.K1;
    o.in.K2 = lip.K2;
    o.in.K3 = lip.K3;
  }
  o.in.alpha_override = o.alpha;
  const sl::TheoryPlan plan = sl::make_plan(o.in, {o.eta_scale, o.iters}, o.cf, o.a2);
  for (const auto& w : plan.warnings) {
    warnings.push_back(w);
  }

  ordered_json results = {{"beta", plan.beta},
                          {"alpha", plan.alpha},
                          {"eta", plan.eta},
                          {"iterations_k", plan.iterations_k},
                          {"kl_bound_at_k", plan.kl_bound_at_k},
                          {"practical",
                           {{"beta", plan.practical.beta},
                            {"eta", plan.practical.eta},
                            {"iterations", plan.practical.iterations},
                            {"brownian_time", plan.practical.brownian_time}}}};
  if (plan.feasibility) {
    const auto& f = *plan.feasibility;
    results["lsi_feasibility"] = {{"C_F", optional_json(f.C_F)},
                                  {"a2", optional_json(f.a2)},
                                  {"a2_min", optional_json(f.a2_min)},
                                  {"a2_ok", optional_json(f.a2_ok)},
                                  {"beta_min", f.beta_min},
                                  {"beta_ok", f.beta_ok},
                                  {"complete", f.complete}};
  } else {
    results["lsi_feasibility"] = nullptr;
  }
  ordered_json provenance = ordered_json::object();
  for (const auto& [k, v] : plan.provenance) {
    provenance[k] = v;
  }
  if (!o.graph.empty()) {
    provenance["n,K1,K2,K3"] = "derived from graph " + o.graph;
  }
  ordered_json config = to_json(plan.inputs);
  config["command"] = "plan";
  config["graph"] = o.graph.empty() ? ordered_json(nullptr) : ordered_json(o.graph);
  config["eta_scale"] = o.eta_scale;
  config["iters"] = o.iters;
  ordered_json report = {{"config", config},
                         {"seed", nullptr},
                         {"results", results},
                         {"provenance", provenance},
                         {"warnings", warnings}};
  emit(report, o.report);
  return kOk;
}

// ------------------------------------------------------ validate-sampler

struct ValidateOptions {
  std::vector<std::size_t> d{3};
  std::vector<double> t{0.1, 0.5, 1.0};
  std::vector<std::string> gof{"3:0.5", "5:1.0", "1.5:2.0"};
  std::size_t samples = 100000;
  double significance = 0.01;
  std::uint64_t seed = 0;
  std::string report;
};

std::pair<double, double> parse_pair(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw UsageError("--gof expects theta:t, got '" + s + "'");
  }
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw UsageError("--gof expects theta:t, got '" + s + "'");
  }
}

int cmd_validate(const ValidateOptions& o) {
  const sl::Rng root(o.seed);
  std::uint64_t stream = 0;
  ordered_json checks = ordered_json::array();
  bool all = true;
  auto add = [&](const sl::CheckOutcome& c) {
    all = all && c.passed;
    checks.push_back(to_json(c));
  };
  for (std::size_t d : o.d) {
    if (d < 2) {
      throw UsageError("validate-sampler: exact sampling needs d >= 2");
    }
    for (double t : o.t) {
      sl::Rng rng = root.split(stream++);
      const sl::RadialSamples s = sl::sample_radial(d, t, o.samples, rng);
      add(sl::check_cos_moment(d, t, s));
      add(sl::check_tan2_bound(d, t, s));
      if (t <= 0.5) {
        add(sl::check_r2_comparison(d, t, s));
      }
      if (t >= sl::SeriesTolerances{}.small_t_threshold) {
        for (const auto& c : sl::check_density(d, t)) {
          add(c);
        }
      }
    }
  }
  ordered_json gof = ordered_json::array();
  for (const auto& spec : o.gof) {
    const auto [theta, t] = parse_pair(spec);
    sl::Rng rng = root.split(stream++);
    const sl::CheckOutcome chi = sl::check_ainfty_gof(theta, t, o.samples, rng, o.significance);
    add(chi);
    add(sl::check_qm_normalization(theta, t));
    gof.push_back({{"theta", theta}, {"t", t}, {"p_value", chi.expected}, {"passed", chi.passed}});
  }
  ordered_json config = {{"command", "validate-sampler"},
                         {"d", o.d},
                         {"t", o.t},
                         {"gof", o.gof},
                         {"N", o.samples},
                         {"significance", o.significance}};
  ordered_json report = {
      {"config", config},
      {"seed", o.seed},
      {"results", {{"all_passed", all}, {"checks", checks}, {"chi_square_summary", gof}}},
      {"provenance",
       {{"radial_cos_moment", "first-moment ODE of the Wright-Fisher radial process"},
        {"tan2_half_angle_bound", "tan-squared second-moment bound for d >= 3"},
        {"radial_r2_comparison", "comparison with Euclidean Brownian motion"},
        {"ainfty_chi_square", "sampled A_inf against the alternating-series pmf"},
        {"qm_normalization", "mass of the truncated series pmf"},
        {"wf_density", "tanh-sinh quadrature of the Beta-mixture transition density"}}},
      {"warnings", ordered_json::array()}};
  emit(report, o.report);
  return all ? kOk : kValidationFailed;
}

// ---------------------------------------------------------------- brute

int cmd_brute(const std::string& graph, std::size_t max_n, const std::string& path) {
  const sl::GraphInstance g = load_graph(graph);
  if (g.n() > max_n) {
    throw UsageError("brute: n = " + std::to_string(g.n()) + " exceeds the limit " +
                     std::to_string(max_n));
  }
  const sl::CutResult best = sl::brute_force_maxcut(g, max_n);
  ordered_json report = {
      {"config", {{"command", "brute"}, {"graph", graph}, {"max_n", max_n}}},
      {"seed", nullptr},
      {"results", {{"n", g.n()}, {"m", g.m()}, {"optimum", to_json(best)}}},
      {"provenance", {{"optimum", "exhaustive search over 2^(n-1) sign patterns"}}},
      {"warnings", ordered_json::array()}};
  emit(report, path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian Langevin on products of spheres: Max-Cut via Burer-Monteiro"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "run Langevin chains and round to a cut");
  s->add_option("--graph", solve.graph, "edge-list file")->required();
  s->add_option("--d", solve.d, "sphere dimension")->check(CLI::PositiveNumber);
  s->add_option("--eta", solve.eta, "step size (default: practical preset)");
  s->add_option("--beta", solve.beta, "inverse temperature (default: practical preset)");
  s->add_option("--eps", solve.eps, "target suboptimality for the preset beta");
  s->add_option("--delta", solve.delta, "failure probability for the preset beta");
  s->add_option("--eta-scale", solve.eta_scale, "preset eta = eta_scale / K2");
  s->add_option("--iters", solve.iters, "iterations per chain")->check(CLI::PositiveNumber);
  s->add_option("--seed", solve.seed, "64-bit seed");
  s->add_option("--gw-samples", solve.gw_samples, "random hyperplanes per rounding");
  s->add_option("--record-every", solve.record_every, "record thinning")
      ->check(CLI::PositiveNumber);
  s->add_option("--chains", solve.chains, "independent chains");
  s->add_option("--mode", solve.mode, "increment mode")
      ->check(CLI::IsMember({"exact", "approx"}));
  s->add_option("--small-t-threshold", solve.threshold, "small-time threshold")
      ->check(CLI::PositiveNumber);
  s->add_flag("--rgd", solve.rgd, "also run the gradient-descent baseline");
  s->add_option("--report", solve.report, "output path (default stdout)");
  s->add_option("--trajectory-csv", solve.trajectory_csv, "write recorded values as CSV");

  PlanOptions plan;
  auto* p = app.add_subcommand("plan", "evaluate the parameter prescriptions");
  p->add_option("--n", plan.in.n, "number of spheres");
  p->add_option("--d", plan.in.d, "sphere dimension");
  p->add_option("--eps", plan.in.eps, "target suboptimality")->required();
  p->add_option("--delta", plan.in.delta, "failure probability")->required();
  p->add_option("--K1", plan.in.K1, "gradient bound");
  p->add_option("--K2", plan.in.K2, "Hessian bound");
  p->add_option("--K3", plan.in.K3, "third-derivative bound");
  p->add_option("--lambda-min", plan.in.lambda_min, "Hessian spectral gap at minima");
  p->add_option("--lambda-tilde", plan.in.lambda_tilde, "Hessian gap at saddles");
  p->add_option("--H0", plan.in.H0, "initial KL divergence bound");
  p->add_option("--alpha", plan.alpha, "override the LSI constant");
  p->add_option("--cf", plan.cf, "gradient lower bound away from critical points");
  p->add_option("--a2", plan.a2, "squared neighbourhood radius");
  p->add_option("--graph", plan.graph, "derive n and K1, K2, K3 from a graph");
  p->add_option("--eta-scale", plan.eta_scale, "practical eta = eta_scale / K2");
  p->add_option("--iters", plan.iters, "practical iteration budget");
  p->add_option("--report", plan.report, "output path (default stdout)");

  ValidateOptions val;
  auto* v = app.add_subcommand("validate-sampler", "statistical checks of the Brownian sampler");
  v->add_option("--d", val.d, "sphere dimensions");
  v->add_option("--t", val.t, "time horizons");
  v->add_option("--gof", val.gof, "theta:t pairs for the A_inf chi-square test");
  v->add_option("--N", val.samples, "draws per check")->check(CLI::PositiveNumber);
  v->add_option("--significance", val.significance, "chi-square significance level");
  v->add_option("--seed", val.seed, "64-bit seed");
  v->add_option("--report", val.report, "output path (default stdout)");

  std::string brute_graph;
  std::string brute_report;
  std::size_t brute_max_n = 24;
  auto* b = app.add_subcommand("brute", "exact Max-Cut by enumeration");
  b->add_option("--graph", brute_graph, "edge-list file")->required();
  b->add_option("--max-n", brute_max_n, "refuse larger instances");
  b->add_option("--report", brute_report, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (s->parsed()) {
      return cmd_solve(solve);
    }
    if (p->parsed()) {
      return cmd_plan(plan);
    }
    if (v->parsed()) {
      return cmd_validate(val);
    }
    return cmd_brute(brute_graph, brute_max_n, brute_report);
  } catch (const sl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const sl::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}
