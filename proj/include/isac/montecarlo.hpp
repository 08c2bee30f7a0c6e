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

// Missed-detection sweeps over random two-scatterer scenes.
//
// Every trial owns an RNG substream keyed by (variant, delta index, trial), so
// the outcome of a sweep is independent of the number of worker threads.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "isac/angular.hpp"
#include "isac/beamsynth.hpp"
#include "isac/detection.hpp"
#include "isac/geometry.hpp"
#include "isac/imaging.hpp"
#include "isac/rng.hpp"
#include "isac/windowing.hpp"

namespace isac {

struct ArraySpec {
  int n_1d = 0;
  double spacing = 0.0;
};

struct ExperimentConfig {
  ArraySpec comms{11, 0.5};
  std::vector<ArraySpec> sensing_variants;
  std::vector<double> delta_grid;
  double noise_db = -10.0;
  int trials = 1000;
  std::uint64_t seed = 1;
  TaperSpec taper{45.0};
  double pfa = 1e-3;
  int max_targets = 10;
  int oversampling = 8;
  double factorization_tol = 1e-6;
  int q_max = 1024;
  int threads = 1;
};

/// Sensing variants N_s in {3, 5, 7} x d_s in {lambda/2, 3 lambda/2, 2 lambda},
/// Delta grid 0.02..0.18 step 0.02, sigma^2 = -10 dB, 45 dB Chebyshev, P_FA 1e-3.
inline ExperimentConfig table1_config(int trials = 10000, std::uint64_t seed = 1) {
  ExperimentConfig c;
  for (int n : {3, 5, 7})
    for (double d : {0.5, 1.5, 2.0}) c.sensing_variants.push_back({n, d});
  for (int k = 1; k <= 9; ++k) c.delta_grid.push_back(0.02 * k);
  c.trials = trials;
  c.seed = seed;
  return c;
}

/// First target uniform on the NAF torus, second at distance delta in a
/// uniformly random direction, unit-modulus coefficients with uniform phase.
inline Scenario place_targets(double delta, Engine& rng) {
  if (!(delta > 0.0 && delta <= 0.5)) throw invalid_argument("place_targets: delta must be in (0, 0.5]");
  const double two_pi = 2.0 * std::numbers::pi;
  const NafPoint first{uniform01(rng) - 0.5, uniform01(rng) - 0.5};
  const double alpha = two_pi * uniform01(rng);
  const NafPoint second = wrap({first.l + delta * std::cos(alpha), first.eta + delta * std::sin(alpha)});
  const double ph1 = two_pi * uniform01(rng);
  const double ph2 = two_pi * uniform01(rng);
  return {{{first, std::polar(1.0, ph1)}, {second, std::polar(1.0, ph2)}}};
}

/// Everything a trial needs for one sensing variant; built once and shared
/// read-only between workers.
struct VariantContext {
  ArrayPair pair;
  int coarray_n_1d = 0;
  AcquisitionSet acq;
  NafGrid grid;
  CfarConfig cfar;
  double rho = 0.0;
  Imager imager;
  PsfModel psf;

  static VariantContext build(const ExperimentConfig& cfg, ArraySpec sensing, std::uint64_t factor_seed) {
    auto pair = validate_pair(make_ura(cfg.comms.n_1d, cfg.comms.spacing), make_ura(sensing.n_1d, sensing.spacing));
    const auto dims = coarray_dims(pair);
    auto acq = factorize(pair, chebyshev_2d(dims.n_1d, cfg.taper, dims.spacing), cfg.q_max, cfg.factorization_tol,
                         FactorizeOptions{factor_seed});
    auto grid = make_grid(default_bins(dims.n_1d, cfg.oversampling));
    const auto cfar = default_cfar(dims.n_1d, cfg.taper, grid.bins_per_axis, cfg.pfa);
    const double rho = resolution(half_mainlobe_width(dims.n_1d, cfg.taper));
    Imager imager(pair, acq, grid);
    PsfModel psf(pair, acq, grid, cfar.guard_cells);
    return {std::move(pair), dims.n_1d, std::move(acq), std::move(grid), cfar, rho, std::move(imager), std::move(psf)};
  }
};

struct TrialOutcome {
  int hits = 0;
  int misses = 0;
  int false_alarms = 0;
};

inline TrialOutcome run_trial(const VariantContext& ctx, const Scenario& scenario, const NoiseModel& noise,
                              int max_targets) {
  const auto image = ctx.imager.reconstruct(scenario, noise);
  const auto dets = detect_all(image, ctx.cfar, ctx.psf, max_targets);
  const auto m = match_truth(dets, scenario, ctx.rho);
  return {m.hits, m.misses, m.false_alarms};
}

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes in n trials (95% by default).
inline Interval wilson_interval(long k, long n, double z = 1.959963984540054) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct PmdPoint {
  double delta = 0.0;
  double pmd = 0.0;       ///< missed targets / (2 * trials)
  int trials = 0;
  Interval ci;            ///< Wilson 95% on the per-target count
  double pmd_trial = 0.0; ///< fraction of trials with at least one miss
  double false_alarms_per_trial = 0.0;
};

struct PmdCurve {
  ArraySpec variant;
  int coarray_n_1d = 0;
  double rho = 0.0;
  int q_count = 0;
  double noise_gain = 0.0;
  std::vector<PmdPoint> points;
};

namespace detail {

template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
}

} // namespace detail

/// P_MD per variant and delta. Factorization happens once per variant.
inline std::vector<PmdCurve> sweep(const ExperimentConfig& cfg) {
  if (cfg.trials <= 0) throw invalid_argument("sweep: trials must be positive");
  if (cfg.sensing_variants.empty() || cfg.delta_grid.empty())
    throw invalid_argument("sweep: need at least one variant and one delta");
  const double variance = std::pow(10.0, cfg.noise_db / 10.0);
  const int targets = 2;

  std::vector<PmdCurve> curves;
  for (std::size_t v = 0; v < cfg.sensing_variants.size(); ++v) {
    const auto spec = cfg.sensing_variants[v];
    const auto ctx = VariantContext::build(cfg, spec, derive_seed(cfg.seed, {0xfac7ULL, v}));
    PmdCurve curve{spec, ctx.coarray_n_1d, ctx.rho, ctx.acq.q_count(), ctx.acq.noise_gain(), {}};

    const int per_delta = cfg.trials;
    const int total = per_delta * static_cast<int>(cfg.delta_grid.size());
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(total));
    detail::parallel_for(total, cfg.threads, [&](int idx) {
      const int d = idx / per_delta;
      const int t = idx % per_delta;
      auto rng = make_engine(cfg.seed, {v, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t)});
      const auto scene = place_targets(cfg.delta_grid[static_cast<std::size_t>(d)], rng);
      const NoiseModel noise{variance, rng()};
      outcomes[static_cast<std::size_t>(idx)] = run_trial(ctx, scene, noise, cfg.max_targets);
    });

    for (std::size_t d = 0; d < cfg.delta_grid.size(); ++d) {
      long misses = 0, failed = 0, fa = 0;
      for (int t = 0; t < per_delta; ++t) {
        const auto& o = outcomes[d * static_cast<std::size_t>(per_delta) + static_cast<std::size_t>(t)];
        misses += o.misses;
        failed += o.misses > 0 ? 1 : 0;
        fa += o.false_alarms;
      }
      const long n = static_cast<long>(targets) * per_delta;
      curve.points.push_back({cfg.delta_grid[d], static_cast<double>(misses) / static_cast<double>(n), per_delta,
                              wilson_interval(misses, n), static_cast<double>(failed) / per_delta,
                              static_cast<double>(fa) / per_delta});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

} // namespace isac
