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

// Uniform rectangular arrays and the sum co-array of a transmit/receive pair.
//
// All positions are in wavelengths and anchored at the corner element, so a
// URA of n x n elements with spacing d occupies [0, (n-1)d]^2. Element (i, j)
// sits at x = i*d, z = j*d and has flat index i*n + j; weight grids use the
// same (i, j) layout.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isac/errors.hpp"

namespace isac {

struct Position {
  double x = 0.0; ///< horizontal, wavelengths
  double z = 0.0; ///< vertical, wavelengths
};

struct ArrayGeometry {
  int n_1d = 0;
  double spacing = 0.0; ///< wavelengths
  std::vector<Position> positions;

  std::size_t size() const noexcept { return positions.size(); }
  double aperture() const noexcept { return spacing * (n_1d - 1); }
};

inline ArrayGeometry make_ura(int n_1d, double spacing) {
  if (n_1d < 1) throw invalid_argument("make_ura: n_1d must be >= 1");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw invalid_argument("make_ura: spacing must be positive");
  ArrayGeometry g{n_1d, spacing, {}};
  g.positions.reserve(static_cast<std::size_t>(n_1d) * n_1d);
  for (int i = 0; i < n_1d; ++i)
    for (int j = 0; j < n_1d; ++j) g.positions.push_back({i * spacing, j * spacing});
  return g;
}

namespace detail {

constexpr double kLatticeTol = 1e-9;

/// Returns k if value == k*unit (relative tolerance), otherwise -1.
inline long lattice_multiple(double value, double unit) {
  const double r = value / unit;
  const double k = std::round(r);
  if (std::abs(r - k) > kLatticeTol * std::max(1.0, std::abs(r))) return -1;
  return static_cast<long>(k);
}

} // namespace detail

/// Communications (transmit) array plus sensing (receive) array.
struct ArrayPair {
  ArrayGeometry comms;
  ArrayGeometry sensing;
  int ratio = 1; ///< m = sensing.spacing / comms.spacing
};

/// Checks d_s = m*d_c with integer m >= 1 and d_s <= d_c * N_c^(1D); the
/// second condition keeps the sum co-array free of holes.
inline ArrayPair validate_pair(const ArrayGeometry& comms, const ArrayGeometry& sensing) {
  if (comms.n_1d < 1 || sensing.n_1d < 1 || !(comms.spacing > 0.0) || !(sensing.spacing > 0.0))
    throw invalid_argument("validate_pair: invalid geometry");
  const long m = detail::lattice_multiple(sensing.spacing, comms.spacing);
  if (m < 1)
    throw constraint_violation("sensing spacing " + std::to_string(sensing.spacing) +
                               " is not an integer multiple of comms spacing " +
                               std::to_string(comms.spacing));
  if (m > comms.n_1d)
    throw constraint_violation("sensing spacing exceeds comms spacing * comms n_1d; "
                               "the sum co-array would have holes");
  return {comms, sensing, static_cast<int>(m)};
}

struct SumCoArray {
  double spacing = 0.0; ///< d+ in wavelengths
  int n_1d = 0;
  Eigen::MatrixXi multiplicity; ///< n_1d x n_1d, indexed like a weight grid

  long total() const { return multiplicity.cast<long>().sum(); }
};

/// Sum co-array of two arbitrary URAs whose spacings are commensurate with
/// the smaller one. Enumerates all pairwise position sums; symmetric in its
/// arguments.
inline SumCoArray coarray_of(const ArrayGeometry& a, const ArrayGeometry& b) {
  const double unit = std::min(a.spacing, b.spacing);
  long max_x = 0;
  long max_z = 0;
  std::vector<std::pair<long, long>> bins;
  bins.reserve(a.size() * b.size());
  for (const auto& pa : a.positions) {
    for (const auto& pb : b.positions) {
      const long kx = detail::lattice_multiple(pa.x + pb.x, unit);
      const long kz = detail::lattice_multiple(pa.z + pb.z, unit);
      if (kx < 0 || kz < 0)
        throw constraint_violation("coarray_of: positions are not on the co-array lattice");
      max_x = std::max(max_x, kx);
      max_z = std::max(max_z, kz);
      bins.emplace_back(kx, kz);
    }
  }
  const long n = std::max(max_x, max_z) + 1;
  SumCoArray out{unit, static_cast<int>(n), Eigen::MatrixXi::Zero(n, n)};
  for (auto [kx, kz] : bins) ++out.multiplicity(kx, kz);
  return out;
}

inline SumCoArray sum_coarray(const ArrayPair& pair) { return coarray_of(pair.comms, pair.sensing); }

struct CoArrayDims {
  double spacing = 0.0;
  int n_1d = 0;
};

/// Closed form: N+ = (d_c (N_c - 1) + d_s (N_s - 1)) / d+ + 1 with d+ = min(d_c, d_s).
inline CoArrayDims coarray_dims(const ArrayPair& pair) {
  const double d_plus = std::min(pair.comms.spacing, pair.sensing.spacing);
  const double span = pair.comms.aperture() + pair.sensing.aperture();
  return {d_plus, static_cast<int>(std::lround(span / d_plus)) + 1};
}

/// Virtual URA carrying the co-array positions.
inline ArrayGeometry coarray_geometry(const ArrayPair& pair) {
  const auto dims = coarray_dims(pair);
  return make_ura(dims.n_1d, dims.spacing);
}

/// Integer step of each array on the co-array lattice.
inline int lattice_step(const ArrayGeometry& g, double d_plus) {
  const long k = detail::lattice_multiple(g.spacing, d_plus);
  if (k < 1) throw constraint_violation("array spacing is not a multiple of the co-array spacing");
  return static_cast<int>(k);
}

} // namespace isac
