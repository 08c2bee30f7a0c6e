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

// Normalized angular frequency (NAF) coordinates and steering.
//
// A direction is (l, eta) = (d/lambda) * (sin(theta) cos(phi), sin(phi)),
// paired with element coordinates (x, z). The shared frame uses the co-array
// spacing d+ as reference, so the fundamental domain is [-0.5, 0.5)^2 and all
// responses of arrays on the d+ lattice are 1-periodic per axis.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "isac/errors.hpp"
#include "isac/geometry.hpp"

namespace isac {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfWavelength = 0.5;

struct NafPoint {
  double l = 0.0;   ///< horizontal
  double eta = 0.0; ///< vertical
};

/// Maps x into [-0.5, 0.5).
inline double wrap_naf(double x) noexcept {
  double w = x - std::floor(x + 0.5);
  if (w >= 0.5) w -= 1.0;
  return w;
}

inline NafPoint wrap(NafPoint p) noexcept { return {wrap_naf(p.l), wrap_naf(p.eta)}; }

inline NafPoint angles_to_naf(double phi, double theta, double spacing) {
  return {spacing * std::sin(theta) * std::cos(phi), spacing * std::sin(phi)};
}

struct Angles {
  double phi = 0.0;   ///< elevation, radians
  double theta = 0.0; ///< azimuth, radians
};

inline Angles naf_to_angles(NafPoint p, double spacing) {
  const double a = p.l / spacing;
  const double b = p.eta / spacing;
  constexpr double slack = 1e-12;
  if (a * a + b * b > 1.0 + slack) throw not_physical("naf_to_angles: point outside the visible region");
  const double phi = std::asin(std::clamp(b, -1.0, 1.0));
  const double c = std::cos(phi);
  if (c <= 0.0) return {phi, 0.0}; // endfire: azimuth is undefined, report 0
  return {phi, std::asin(std::clamp(a / c, -1.0, 1.0))};
}

/// Euclidean distance on the unit torus.
inline double toroidal_distance(NafPoint a, NafPoint b) noexcept {
  const double dl = wrap_naf(a.l - b.l);
  const double de = wrap_naf(a.eta - b.eta);
  return std::hypot(dl, de);
}

using SteeringMatrix = Eigen::MatrixXcd;

/// N x K matrix with entry exp(-j 2 pi (x_n l_k + z_n eta_k) / reference_spacing).
inline SteeringMatrix steering_matrix(const ArrayGeometry& geom, std::span<const NafPoint> directions,
                                      double reference_spacing) {
  if (directions.empty()) throw invalid_argument("steering_matrix: no directions");
  SteeringMatrix a(static_cast<Eigen::Index>(geom.size()), static_cast<Eigen::Index>(directions.size()));
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const auto& v = directions[static_cast<std::size_t>(k)];
    for (Eigen::Index n = 0; n < a.rows(); ++n) {
      const auto& p = geom.positions[static_cast<std::size_t>(n)];
      const double phase = -kTwoPi * (p.x * v.l + p.z * v.eta) / reference_spacing;
      a(n, k) = std::polar(1.0, phase);
    }
  }
  return a;
}

inline Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, NafPoint v, double reference_spacing) {
  const NafPoint dirs[1] = {v};
  return steering_matrix(geom, dirs, reference_spacing).col(0);
}

/// Uniform grid over [-0.5, 0.5)^2. Point (i, j) = (l_i, eta_j) has flat
/// index i * bins + j; images use the same (i, j) = (l, eta) layout.
struct NafGrid {
  int bins_per_axis = 0;
  std::vector<NafPoint> points;

  double step() const noexcept { return 1.0 / bins_per_axis; }
  double coord(int i) const noexcept { return -0.5 + static_cast<double>(i) / bins_per_axis; }
  NafPoint at(int i, int j) const noexcept { return {coord(i), coord(j)}; }
  /// Nearest bin index of a (wrapped) coordinate.
  int nearest(double x) const noexcept {
    const long k = std::lround((wrap_naf(x) + 0.5) * bins_per_axis);
    return static_cast<int>(((k % bins_per_axis) + bins_per_axis) % bins_per_axis);
  }
};

inline NafGrid make_grid(int bins_per_axis) {
  if (bins_per_axis < 2 || bins_per_axis % 2 != 0)
    throw invalid_argument("make_grid: bins_per_axis must be a positive even integer");
  NafGrid g{bins_per_axis, {}};
  g.points.reserve(static_cast<std::size_t>(bins_per_axis) * bins_per_axis);
  for (int i = 0; i < bins_per_axis; ++i)
    for (int j = 0; j < bins_per_axis; ++j) g.points.push_back(g.at(i, j));
  return g;
}

/// Default oversampling: 8 bins per co-array element, rounded up to even.
inline int default_bins(int coarray_n_1d, int oversampling = 8) {
  const int b = coarray_n_1d * oversampling;
  return b + (b % 2);
}

/// Per-axis phasor table E(r, i) = exp(j 2 pi i * step * (scan - coords[r])).
/// Scan steering applies conj(a(u)), so an array on integer lattice offsets i
/// responds at v with sum_i w_i E(v, i).
inline Eigen::MatrixXcd axis_phasors(std::span<const double> coords, int n, double step, double scan) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(coords.size()), n);
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    const double base = kTwoPi * step * (scan - coords[static_cast<std::size_t>(r)]);
    for (int i = 0; i < n; ++i) e(r, i) = std::polar(1.0, base * i);
  }
  return e;
}

inline std::vector<double> grid_axis(const NafGrid& grid) {
  std::vector<double> c(static_cast<std::size_t>(grid.bins_per_axis));
  for (int i = 0; i < grid.bins_per_axis; ++i) c[static_cast<std::size_t>(i)] = grid.coord(i);
  return c;
}

} // namespace isac
