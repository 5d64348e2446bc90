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

// Max-Cut on weighted graphs and its Burer-Monteiro relaxation.
//
// Sign conventions live here and only here. With A_G the adjacency matrix
// the relaxation maximizes <x, A x> for A = -A_G, and the solver minimizes
// F(x) = -<x, A x> = <x, A_G x>. For unit vectors
//   sum_{i<j} w_ij (1 - <x_i, x_j>) / 2 = (2W + <x, A x>) / 4,
// W the total edge weight, which equals the cut value at +-1 embeddings.

#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sphere_langevin/errors.hpp"
#include "sphere_langevin/geometry.hpp"
#include "sphere_langevin/objective.hpp"

namespace sphere_langevin {

struct Edge {
  std::size_t i = 0;  // 0-based, i < j
  std::size_t j = 0;
  double weight = 0.0;
};

class GraphInstance {
 public:
  GraphInstance(std::size_t n, std::vector<Edge> edges)
      : n_(n), edges_(std::move(edges)), adjacency_(n, to_entries(n, edges_)) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// A_G.
  const SymmetricCostMatrix& adjacency() const noexcept { return adjacency_; }
  /// A = -A_G, the matrix whose quadratic form the relaxation maximizes.
  SymmetricCostMatrix bm_cost() const { return adjacency_.negated(); }

  double total_weight() const {
    double w = 0.0;
    for (const auto& e : edges_) {
      w += e.weight;
    }
    return w;
  }

 private:
  static std::vector<CostEntry> to_entries(std::size_t n, std::vector<Edge>& edges) {
    if (n < 1) {
      throw std::invalid_argument("GraphInstance: n must be >= 1");
    }
    std::vector<CostEntry> out;
    out.reserve(edges.size());
    for (auto& e : edges) {
      if (e.i > e.j) {
        std::swap(e.i, e.j);
      }
      if (e.i == e.j) {
        throw std::invalid_argument("GraphInstance: self loop at vertex " + std::to_string(e.i));
      }
      out.push_back({e.i, e.j, e.weight});
    }
    return out;
  }

  std::size_t n_;
  std::vector<Edge> edges_;
  SymmetricCostMatrix adjacency_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') {
      ++pos;
    }
    if (pos > start) {
      out.push_back(line.substr(start, pos - start));
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

/// Reads the rudy/Gset edge list: a header "n m" followed by exactly m lines
/// "i j w" (1-based vertices). Lines end in LF or CRLF; fields are separated
/// by runs of spaces or tabs. Only blank lines may follow the last edge.
inline GraphInstance parse_graph(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& out) {
    if (!std::getline(in, raw)) {
      return false;
    }
    ++line_no;
    out = raw;
    if (!out.empty() && out.back() == '\r') {
      out.remove_suffix(1);
    }
    return true;
  };

  std::string_view line;
  if (!next_line(line)) {
    throw ParseError(0, "empty input: expected header 'n m'");
  }
  auto header = detail::split_fields(line);
  if (header.size() != 2) {
    throw ParseError(line_no, "header must be 'n m'");
  }
  const auto n = detail::parse_number<std::size_t>(header[0], line_no, "vertex count");
  const auto m = detail::parse_number<std::size_t>(header[1], line_no, "edge count");
  if (n < 1) {
    throw ParseError(line_no, "vertex count must be >= 1");
  }

  std::vector<Edge> edges;
  edges.reserve(m);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (edges.size() < m && next_line(line)) {
    const auto fields = detail::split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 'i j w', got " + std::to_string(fields.size()) +
                                    " field(s)");
    }
    auto i = detail::parse_number<std::size_t>(fields[0], line_no, "vertex index");
    auto j = detail::parse_number<std::size_t>(fields[1], line_no, "vertex index");
    const auto w = detail::parse_number<double>(fields[2], line_no, "weight");
    if (i < 1 || i > n || j < 1 || j > n) {
      throw ParseError(line_no, "vertex index out of range [1, " + std::to_string(n) + "]");
    }
    if (i == j) {
      throw ParseError(line_no, "self loop at vertex " + std::to_string(i));
    }
    if (!std::isfinite(w)) {
      throw ParseError(line_no, "non-finite weight");
    }
    if (i > j) {
      std::swap(i, j);
    }
    if (!seen.emplace(i, j).second) {
      throw ParseError(line_no, "duplicate edge (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
    }
    edges.push_back({i - 1, j - 1, w});
  }
  if (edges.size() < m) {
    throw ParseError(0, "declared " + std::to_string(m) + " edges, found " +
                            std::to_string(edges.size()));
  }
  while (next_line(line)) {
    if (!detail::split_fields(line).empty()) {
      throw ParseError(line_no, "more edges than the declared " + std::to_string(m));
    }
  }
  return GraphInstance(n, std::move(edges));
}

inline GraphInstance parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

/// Canonical edge-list text accepted by parse_graph.
inline void serialize_graph(const GraphInstance& g, std::ostream& out) {
  out << g.n() << ' ' << g.m() << '\n';
  for (const auto& e : g.edges()) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, e.weight);
    out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

struct CutAssignment {
  std::vector<int> signs;  // each -1 or +1

  CutAssignment flipped() const {
    CutAssignment out = *this;
    for (auto& s : out.signs) {
      s = -s;
    }
    return out;
  }
};

/// Sum of w_ij over edges whose endpoints carry different signs.
inline double cut_value(const GraphInstance& g, const CutAssignment& cut) {
  if (cut.signs.size() != g.n()) {
    throw ShapeError("cut_value: assignment has " + std::to_string(cut.signs.size()) +
                     " signs for n=" + std::to_string(g.n()));
  }
  double v = 0.0;
  for (const auto& e : g.edges()) {
    if (cut.signs[e.i] != cut.signs[e.j]) {
      v += e.weight;
    }
  }
  return v;
}

struct CutResult {
  CutAssignment cut;
  double value = 0.0;
};

/// Exhaustive maximum over the 2^{n-1} assignments with vertex 0 fixed to +1,
/// visited in Gray-code order. Ties keep the first assignment found.
inline CutResult brute_force_maxcut(const GraphInstance& g, std::size_t max_n = 24) {
  const std::size_t n = g.n();
  if (n > max_n) {
    throw std::length_error("brute_force_maxcut: n=" + std::to_string(n) +
                            " exceeds the limit of " + std::to_string(max_n));
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.i].emplace_back(e.j, e.weight);
    adj[e.j].emplace_back(e.i, e.weight);
  }
  std::vector<int> signs(n, 1);
  std::vector<int> best_signs = signs;
  double value = 0.0;
  double best = 0.0;
  const std::uint64_t count = n > 1 ? (std::uint64_t{1} << (n - 1)) : 1;
  for (std::uint64_t code = 1; code < count; ++code) {
    const auto v = static_cast<std::size_t>(std::countr_zero(code)) + 1;
    for (const auto& [u, w] : adj[v]) {
      value += signs[u] == signs[v] ? w : -w;
    }
    signs[v] = -signs[v];
    if (value > best) {
      best = value;
      best_signs = signs;
    }
  }
  CutAssignment cut{std::move(best_signs)};
  const double exact = cut_value(g, cut);
  return {std::move(cut), exact};
}

/// Random-hyperplane rounding: signs sign<x_i, r> for r uniform on S^d, zero
/// mapped to +1; best of `samples` hyperplanes, first occurrence on ties.
template <typename Urbg>
CutResult gw_round(const PointOnM& x, const GraphInstance& g, std::size_t samples, Urbg& rng) {
  if (samples < 1) {
    throw std::invalid_argument("gw_round: samples must be >= 1");
  }
  if (x.n() != g.n()) {
    throw ShapeError("gw_round: point and graph disagree on n");
  }
  std::optional<CutResult> best;
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::RowVectorXd r = random_unit_vector(x.d() + 1, rng);
    CutAssignment cut{std::vector<int>(g.n())};
    for (std::size_t i = 0; i < g.n(); ++i) {
      cut.signs[i] = x.factor(i).dot(r) >= 0.0 ? 1 : -1;
    }
    const double v = cut_value(g, cut);
    if (!best || v > best->value) {
      best = CutResult{std::move(cut), v};
    }
  }
  return *best;
}

struct CutReport {
  double quadratic_value = 0.0;  // <x, A x> with A = -A_G
  double relaxed_cut = 0.0;      // (2W + <x, A x>) / 4
  double total_weight = 0.0;
  CutResult rounded;
  std::size_t samples = 0;
  std::optional<CutResult> optimum;      // brute force, small n only
  std::optional<double> rounded_ratio;   // rounded / optimum
};

template <typename Urbg>
CutReport bm_cut_report(const GraphInstance& g, const PointOnM& x, std::size_t samples, Urbg& rng,
                        std::size_t brute_force_limit = 20) {
  CutReport rep;
  const SymmetricCostMatrix a = g.bm_cost();
  rep.quadratic_value = -bm_value(a, x);
  rep.total_weight = g.total_weight();
  rep.relaxed_cut = (2.0 * rep.total_weight + rep.quadratic_value) / 4.0;
  rep.rounded = gw_round(x, g, samples, rng);
  rep.samples = samples;
  if (g.n() <= brute_force_limit) {
    rep.optimum = brute_force_maxcut(g);
    rep.rounded_ratio =
        rep.optimum->value != 0.0 ? rep.rounded.value / rep.optimum->value : 1.0;
  }
  return rep;
}

}  // namespace sphere_langevin
