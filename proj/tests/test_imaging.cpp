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

#include "isac/imaging.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

struct Fixture {
  ArrayPair pair = validate_pair(make_ura(11, 0.5), make_ura(3, 2.0));
  AcquisitionSet acq;
  NafGrid grid = make_grid(76);

  Fixture() {
    const auto d = coarray_dims(pair);
    acq = factorize(pair, chebyshev_2d(d.n_1d, TaperSpec(45.0), d.spacing), 1024, 1e-6);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

} // namespace

TEST(Imager, MatchesExactAcquisitionWithoutNoise) {
  const auto& f = fixture();
  oracle::Gen gen(41);
  const Scenario scene{{{{0.1, -0.2}, std::polar(1.0, 0.3)}, {{-0.33, 0.05}, std::polar(0.7, 2.0)}}};
  const auto img = reconstruct(f.pair, f.acq, scene, {0.0, 0}, f.grid);
  Engine rng(1);
  for (int s = 0; s < 25; ++s) {
    const int i = gen.integer(0, 75), j = gen.integer(0, 75);
    cplx y{0.0, 0.0};
    for (int q = 0; q < f.acq.q_count(); ++q) y += acquire_pixel(f.pair, f.acq, q, scene, 0.0, f.grid.at(i, j), rng);
    ASSERT_LT(std::abs(img.values(i, j) - y), 1e-9);
  }
}

TEST(Imager, Superposition) {
  const auto& f = fixture();
  const Imager im(f.pair, f.acq, f.grid);
  const Scenario a{{{{0.1, 0.1}, {1.0, 0.0}}}};
  const Scenario b{{{{-0.2, 0.3}, {0.0, 1.0}}}};
  Scenario both = a;
  both.targets.push_back(b.targets[0]);
  const auto ia = im.reconstruct(a, {});
  const auto ib = im.reconstruct(b, {});
  const auto iab = im.reconstruct(both, {});
  EXPECT_LT((iab.values - ia.values - ib.values).norm(), 1e-10);
}

TEST(Imager, OnGridTargetPeaksAtItsCoefficient) {
  const auto& f = fixture();
  const cplx gamma = std::polar(1.0, 1.1);
  const auto img = reconstruct(f.pair, f.acq, {{{f.grid.at(50, 20), gamma}}}, {}, f.grid);
  Eigen::Index i = 0, j = 0;
  img.values.cwiseAbs().maxCoeff(&i, &j);
  EXPECT_EQ(i, 50);
  EXPECT_EQ(j, 20);
  EXPECT_LT(std::abs(img.values(50, 20) - gamma), 1e-6);
}

TEST(Imager, EmptySceneIsNoiseOnly) {
  const auto& f = fixture();
  EXPECT_EQ(reconstruct(f.pair, f.acq, {}, {}, f.grid).values.norm(), 0.0);
  EXPECT_GT(reconstruct(f.pair, f.acq, {}, {0.1, 3}, f.grid).values.norm(), 0.0);
}

TEST(Imager, DeterministicPerSeed) {
  const auto& f = fixture();
  const Scenario scene{{{{0.0, 0.0}, {1.0, 0.0}}}};
  const auto a = reconstruct(f.pair, f.acq, scene, {0.1, 9}, f.grid);
  const auto b = reconstruct(f.pair, f.acq, scene, {0.1, 9}, f.grid);
  const auto c = reconstruct(f.pair, f.acq, scene, {0.1, 10}, f.grid);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(NoiseModel, FromDb) {
  EXPECT_NEAR(NoiseModel::from_db(-10.0, 1).variance, 0.1, 1e-15);
  EXPECT_NEAR(NoiseModel::from_db(0.0, 1).variance, 1.0, 1e-15);
}

TEST(Noise, PerDwellDrawsPropagateThroughRxWeights) {
  // Exact acquisition: E|sum_q w_q^T n_q|^2 = sigma^2 sum_q |rx_q|^2.
  const auto& f = fixture();
  const double sigma2 = 0.1;
  Engine rng(derive_seed(5, {1}));
  const int draws = 100000;
  double acc = 0.0;
  const NafPoint u{0.17, -0.06};
  for (int d = 0; d < draws; ++d) {
    cplx y{0.0, 0.0};
    for (int q = 0; q < f.acq.q_count(); ++q) y += acquire_pixel(f.pair, f.acq, q, {}, sigma2, u, rng);
    acc += std::norm(y);
  }
  EXPECT_NEAR(acc / draws / (sigma2 * f.acq.noise_gain()), 1.0, 0.05);
}

TEST(Noise, FastPathPixelPower) {
  const auto& f = fixture();
  const double sigma2 = 0.1;
  const Imager im(f.pair, f.acq, f.grid);
  double acc = 0.0;
  long n = 0;
  for (std::uint64_t s = 0; n < 100000; ++s) {
    const auto img = im.reconstruct({}, {sigma2, s});
    acc += img.power().sum();
    n += img.values.size();
  }
  EXPECT_NEAR(acc / n / (sigma2 * f.acq.noise_gain()), 1.0, 0.05);
}
