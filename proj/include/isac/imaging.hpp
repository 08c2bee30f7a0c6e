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

// Noisy mono-static acquisition of point-scatterer scenes.
//
// Per acquisition q and scan direction u:
//   y_q(u) = w_q^s(u)^T A^s Gamma A^c^T w_q^c(u) + w_q^s(u)^T n_q,
// with w(u) = conj(a(u)) .* taper and n_q ~ CN(0, sigma^2 I) drawn fresh for
// every (q, u) dwell. The image pixel is y(u) = sum_q y_q(u).

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "isac/angular.hpp"
#include "isac/beamsynth.hpp"
#include "isac/geometry.hpp"
#include "isac/rng.hpp"

namespace isac {

struct Target {
  NafPoint position;
  cplx coefficient{1.0, 0.0};
};

struct Scenario {
  std::vector<Target> targets;
};

struct NoiseModel {
  double variance = 0.0; ///< sigma^2 per complex receive sample, linear
  std::uint64_t seed = 0;

  static NoiseModel from_db(double sigma2_db, std::uint64_t seed) {
    return {std::pow(10.0, sigma2_db / 10.0), seed};
  }
};

/// Complex image on a NafGrid; values(i, j) is the pixel at grid.at(i, j).
struct NafImage {
  Eigen::MatrixXcd values;
  int bins_per_axis = 0;

  Eigen::MatrixXd power() const { return values.cwiseAbs2(); }
};

/// Exact single-dwell acquisition y_q(u), including a fresh noise vector.
inline cplx acquire_pixel(const ArrayPair& pair, const AcquisitionSet& acq, int q, const Scenario& scenario,
                          double noise_variance, NafPoint scan, Engine& rng) {
  const double ref = coarray_dims(pair).spacing;
  const auto flat = [](const Eigen::MatrixXcd& w) {
    // flat index i * n + j, matching ArrayGeometry element order
    Eigen::VectorXcd v(w.size());
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) v(i * w.cols() + j) = w(i, j);
    return v;
  };
  const auto uq = static_cast<std::size_t>(q);
  const Eigen::VectorXcd ws =
      steering_vector(pair.sensing, scan, ref).conjugate().cwiseProduct(flat(acq.rx_weights[uq].values));
  const Eigen::VectorXcd wc =
      steering_vector(pair.comms, scan, ref).conjugate().cwiseProduct(flat(acq.tx_weights[uq].values));

  cplx y{0.0, 0.0};
  if (!scenario.targets.empty()) {
    std::vector<NafPoint> dirs;
    Eigen::VectorXcd gamma(static_cast<Eigen::Index>(scenario.targets.size()));
    for (std::size_t k = 0; k < scenario.targets.size(); ++k) {
      dirs.push_back(scenario.targets[k].position);
      gamma(static_cast<Eigen::Index>(k)) = scenario.targets[k].coefficient;
    }
    const auto as = steering_matrix(pair.sensing, dirs, ref);
    const auto ac = steering_matrix(pair.comms, dirs, ref);
    y = (ws.transpose() * as * gamma.asDiagonal() * ac.transpose() * wc)(0, 0);
  }
  if (noise_variance > 0.0) {
    Eigen::VectorXcd n(ws.size());
    for (auto& v : n) v = complex_normal(rng, noise_variance);
    y += ws.cwiseProduct(n).sum();
  }
  return y;
}

/// Fast image formation for a fixed pair, acquisition set and grid.
///
/// The noiseless image is the superposition of co-array PSFs, evaluated as
/// E * (W+ .* sum_k Gamma_k g_k h_k^T) * E^T with per-axis phasor tables. The
/// dwell noise sum_q w_q^T n_q is a sum of independent circular Gaussians and
/// is drawn directly as one CN(0, sigma^2 sum_q |rx_q|^2) sample per pixel.
/// Each grid row uses its own substream, so images do not depend on the order
/// rows are produced in.
class Imager {
public:
  Imager(const ArrayPair& pair, const AcquisitionSet& acq, const NafGrid& grid)
      : effective_(effective_weights(pair, acq)), noise_gain_(acq.noise_gain()), bins_(grid.bins_per_axis) {
    const auto axis = grid_axis(grid);
    phasors_ = axis_phasors(axis, effective_.n_1d(), 1.0, 0.0).conjugate(); // E(r, i) = exp(+j 2 pi i l_r)
  }

  const WeightGrid& effective() const noexcept { return effective_; }
  double noise_gain() const noexcept { return noise_gain_; }
  int bins() const noexcept { return bins_; }

  /// Co-array coefficients of the scene: W+ .* sum_k Gamma_k exp(-j 2 pi (i l_k + j eta_k)).
  Eigen::MatrixXcd scene_coefficients(std::span<const Target> targets) const {
    const int n = effective_.n_1d();
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd g(n), h(n);
    for (const auto& t : targets) {
      for (int i = 0; i < n; ++i) {
        g(i) = std::polar(1.0, -kTwoPi * i * t.position.l);
        h(i) = std::polar(1.0, -kTwoPi * i * t.position.eta);
      }
      c.noalias() += t.coefficient * g * h.transpose();
    }
    return c.cwiseProduct(effective_.values);
  }

  /// Noiseless image of the given co-array coefficients on the grid.
  Eigen::MatrixXcd render(const Eigen::MatrixXcd& coefficients) const {
    return phasors_ * coefficients * phasors_.transpose();
  }

  NafImage reconstruct(const Scenario& scenario, const NoiseModel& noise) const {
    NafImage img{render(scene_coefficients(scenario.targets)), bins_};
    if (noise.variance > 0.0) {
      const double v = noise.variance * noise_gain_;
      for (int i = 0; i < bins_; ++i) {
        auto rng = make_engine(noise.seed, {static_cast<std::uint64_t>(i)});
        for (int j = 0; j < bins_; ++j) img.values(i, j) += complex_normal(rng, v);
      }
    }
    return img;
  }

private:
  WeightGrid effective_;
  double noise_gain_;
  int bins_;
  Eigen::MatrixXcd phasors_;
};

inline NafImage reconstruct(const ArrayPair& pair, const AcquisitionSet& acq, const Scenario& scenario,
                            const NoiseModel& noise, const NafGrid& grid) {
  return Imager(pair, acq, grid).reconstruct(scenario, noise);
}

} // namespace isac
