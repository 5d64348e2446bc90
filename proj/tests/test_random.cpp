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
#include <random>
#include <set>

#include "sphere_langevin/random.hpp"

namespace sphere_langevin {
namespace {

TEST(Philox, KnownAnswers) {
  using Block = std::array<std::uint32_t, 4>;
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                              {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, DeterministicAndSeedSensitive) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs = differs || x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Philox, SplitIgnoresParentPosition) {
  Rng parent(7);
  const Rng early = parent.split(3);
  for (int i = 0; i < 57; ++i) {
    parent();
  }
  Rng late = parent.split(3);
  Rng e = early;
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(e(), late());
  }
}

TEST(Philox, SplitStreamsAreDistinct) {
  const Rng root(11);
  std::set<std::uint64_t> ids{root.stream()};
  std::set<std::uint64_t> first;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng child = root.split(i);
    ids.insert(child.stream());
    first.insert(child());
    ids.insert(child.split(0).stream());
  }
  EXPECT_EQ(ids.size(), 2001u);
  EXPECT_EQ(first.size(), 1000u);
}

TEST(Philox, SiblingStreamsUncorrelated) {
  const Rng root(5);
  Rng a = root.split(0), b = root.split(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 100000;
  double sab = 0, sa = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = u(a), y = u(b);
    sa += x;
    sb += y;
    sab += x * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  // Var of a U(0,1) is 1/12, so corr = 12 cov with SE 1/sqrt(n).
  EXPECT_LE(std::abs(12.0 * cov), 4.0 / std::sqrt(n));
  EXPECT_NEAR(sa / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Philox, UniformBits) {
  Rng rng(9);
  const int n = 200000;
  std::array<int, 64> ones{};
  for (int i = 0; i < n; ++i) {
    const auto x = rng();
    for (int bit = 0; bit < 64; ++bit) {
      ones[bit] += static_cast<int>((x >> bit) & 1U);
    }
  }
  const double se = std::sqrt(0.25 / n);
  for (int c : ones) {
    EXPECT_NEAR(static_cast<double>(c) / n, 0.5, 5.0 * se);
  }
}

}  // namespace
}  // namespace sphere_langevin
