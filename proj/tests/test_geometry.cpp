// SPDX-License-Identifier: Apache-2.0
//
// isac-arrays: joint beamforming simulation for dissimilar mono-static arrays
// Copyright (C) 2026 The isac-arrays authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <set>

#include "isac/geometry.hpp"
#include "oracles.hpp"

using namespace isac;

TEST(MakeUra, CommsArrayCorners) {
  const auto g = make_ura(11, 0.5);
  ASSERT_EQ(g.size(), 121u);
  EXPECT_DOUBLE_EQ(g.positions.front().x, 0.0);
  EXPECT_DOUBLE_EQ(g.positions.front().z, 0.0);
  EXPECT_DOUBLE_EQ(g.positions.back().x, 5.0);
  EXPECT_DOUBLE_EQ(g.positions.back().z, 5.0);
}

TEST(MakeUra, SingleElementAndSparse) {
  const auto one = make_ura(1, 0.5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.positions[0].x, 0.0);
  const auto sparse = make_ura(3, 2.0);
  ASSERT_EQ(sparse.size(), 9u);
  EXPECT_DOUBLE_EQ(sparse.positions.back().x, 4.0);
  EXPECT_DOUBLE_EQ(sparse.positions.back().z, 4.0);
}

TEST(MakeUra, RejectsBadArguments) {
  EXPECT_THROW(make_ura(0, 0.5), isac::invalid_argument);
  EXPECT_THROW(make_ura(3, 0.0), isac::invalid_argument);
  EXPECT_THROW(make_ura(3, -1.0), isac::invalid_argument);
}

TEST(MakeUra, LatticeProperty) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(1, 20);
    const double d = gen.real(0.1, 3.0);
    const auto g = make_ura(n, d);
    ASSERT_EQ(g.size(), static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto& p = g.positions[static_cast<std::size_t>(i * n + j)];
        ASSERT_EQ(p.x, i * d);
        ASSERT_EQ(p.z, j * d);
      }
  }
}

TEST(ValidatePair, PaperSetups) {
  EXPECT_EQ(validate_pair(make_ura(11, 0.5), make_ura(3, 2.0)).ratio, 4);
  EXPECT_EQ(validate_pair(make_ura(11, 0.5), make_ura(9, 0.5)).ratio, 1);
}

TEST(ValidatePair, RejectsNonIntegerRatio) {
  EXPECT_THROW(validate_pair(make_ura(11, 0.5), make_ura(3, 0.75)), constraint_violation);
  EXPECT_THROW(validate_pair(make_ura(11, 0.5), make_ura(3, 0.25)), constraint_violation);
}

TEST(ValidatePair, RejectsHoles) {
  EXPECT_NO_THROW(validate_pair(make_ura(11, 0.5), make_ura(2, 5.5)));
  EXPECT_THROW(validate_pair(make_ura(11, 0.5), make_ura(2, 6.0)), constraint_violation);
}

TEST(SumCoArray, SetupsAandBShareTheCoArray) {
  const auto a = sum_coarray(validate_pair(make_ura(11, 0.5), make_ura(9, 0.5)));
  const auto b = sum_coarray(validate_pair(make_ura(11, 0.5), make_ura(3, 2.0)));
  EXPECT_EQ(a.n_1d, 19);
  EXPECT_EQ(b.n_1d, 19);
  EXPECT_DOUBLE_EQ(a.spacing, 0.5);
  EXPECT_DOUBLE_EQ(b.spacing, 0.5);
  EXPECT_TRUE(((a.multiplicity.array() > 0) == (b.multiplicity.array() > 0)).all());
  EXPECT_EQ(a.total(), 121 * 81);
  EXPECT_EQ(b.total(), 121 * 9);
}

TEST(SumCoArray, Degenerate) {
  const auto c = sum_coarray(validate_pair(make_ura(1, 0.5), make_ura(1, 0.5)));
  EXPECT_EQ(c.n_1d, 1);
  EXPECT_EQ(c.multiplicity(0, 0), 1);
}

TEST(SumCoArray, MatchesBruteForceOnRandomPairs) {
  oracle::Gen gen(12);
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = gen.pair();
    const auto c = sum_coarray(p);
    const auto o = oracle::brute_coarray(p.comms, p.sensing);
    ASSERT_EQ(c.n_1d, o.n_1d);
    ASSERT_NEAR(c.spacing, o.spacing, 1e-9);
    ASSERT_EQ(static_cast<std::size_t>(c.n_1d * c.n_1d), o.count.size()) << "co-array has holes";
    for (int i = 0; i < c.n_1d; ++i)
      for (int j = 0; j < c.n_1d; ++j)
        ASSERT_EQ(c.multiplicity(i, j), o.count.at({oracle::key(i * c.spacing), oracle::key(j * c.spacing)}));
  }
}

TEST(SumCoArray, Invariants) {
  oracle::Gen gen(13);
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = gen.pair();
    const auto c = sum_coarray(p);
    ASSERT_EQ(c.total(), static_cast<long>(p.comms.size() * p.sensing.size()));
    ASSERT_GE(c.multiplicity.minCoeff(), 1);
    const int n = c.n_1d;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ASSERT_EQ(c.multiplicity(i, j), c.multiplicity(n - 1 - i, n - 1 - j));
  }
}

TEST(CoArrayDims, ClosedFormMatchesEnumeration) {
  oracle::Gen gen(14);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = gen.pair();
    const auto d = coarray_dims(p);
    const auto c = sum_coarray(p);
    ASSERT_EQ(d.n_1d, c.n_1d);
    ASSERT_DOUBLE_EQ(d.spacing, c.spacing);
  }
}

TEST(CoArrayDims, TableOneVariants) {
  const std::set<std::pair<int, double>> variants{{3, 0.5}, {3, 1.5}, {3, 2.0}, {5, 0.5}, {5, 1.5},
                                                   {5, 2.0}, {7, 0.5}, {7, 1.5}, {7, 2.0}};
  for (auto [n, d] : variants) {
    const auto p = validate_pair(make_ura(11, 0.5), make_ura(n, d));
    // 11 + (n - 1) * m elements per side
    EXPECT_EQ(coarray_dims(p).n_1d, 11 + (n - 1) * static_cast<int>(std::lround(d / 0.5)));
    EXPECT_EQ(coarray_dims(p).n_1d, sum_coarray(p).n_1d);
  }
}

TEST(LatticeStep, PerArray) {
  const auto p = validate_pair(make_ura(11, 0.5), make_ura(3, 2.0));
  EXPECT_EQ(lattice_step(p.comms, 0.5), 1);
  EXPECT_EQ(lattice_step(p.sensing, 0.5), 4);
  EXPECT_THROW(lattice_step(make_ura(2, 0.75), 0.5), constraint_violation);
}
