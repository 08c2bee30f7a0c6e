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

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "isac/angular.hpp"
#include "isac/errors.hpp"

namespace isac {

/// Dolph-Chebyshev sidelobe specification. Attenuation is positive dB.
class TaperSpec {
public:
  explicit TaperSpec(double sidelobe_attenuation_db = 45.0) : db_(sidelobe_attenuation_db) {
    if (!(db_ > 0.0) || !std::isfinite(db_)) throw invalid_argument("TaperSpec: attenuation must be positive");
    ratio_ = std::pow(10.0, -db_ / 20.0);
  }

  double sidelobe_attenuation_db() const noexcept { return db_; }
  double sidelobe_ratio() const noexcept { return ratio_; }

private:
  double db_;
  double ratio_;
};

/// An n x n weight grid for one URA (or the co-array), indexed (x, z).
struct WeightGrid {
  Eigen::MatrixXcd values;
  double spacing = kHalfWavelength;

  int n_1d() const noexcept { return static_cast<int>(values.rows()); }
};

/// Dolph-Chebyshev window of length n, normalized to unit sum.
///
/// Built as the inverse DFT of the Chebyshev polynomial T_{n-1}(x0 cos(pi k/n))
/// sampled on n points, then mirrored so the result is exactly symmetric.
inline std::vector<double> chebyshev_1d(int n, const TaperSpec& spec) {
  if (n < 2) throw invalid_argument("chebyshev_1d: n must be >= 2");
  const int order = n - 1;
  const double x0 = std::cosh(std::acosh(1.0 / spec.sidelobe_ratio()) / order);
  const double pi = std::numbers::pi;

  std::vector<cplx> p(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double x = x0 * std::cos(pi * k / n);
    double t;
    if (x > 1.0)
      t = std::cosh(order * std::acosh(x));
    else if (x < -1.0)
      t = (order % 2 == 0 ? 1.0 : -1.0) * std::cosh(order * std::acosh(-x));
    else
      t = std::cos(order * std::acos(x));
    // Even lengths need a half-sample shift to land on a symmetric window.
    p[static_cast<std::size_t>(k)] = (n % 2 == 0) ? std::polar(t, pi * k / n) : cplx{t, 0.0};
  }

  std::vector<double> spectrum(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    cplx acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) acc += p[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * pi * k * m / n);
    spectrum[static_cast<std::size_t>(m)] = acc.real();
  }

  std::vector<double> w(static_cast<std::size_t>(n));
  if (n % 2 == 1) {
    const int h = (n + 1) / 2;
    for (int i = 0; i < h; ++i) {
      w[static_cast<std::size_t>(h - 1 + i)] = spectrum[static_cast<std::size_t>(i)];
      w[static_cast<std::size_t>(h - 1 - i)] = spectrum[static_cast<std::size_t>(i)];
    }
  } else {
    const int h = n / 2;
    for (int i = 0; i < h; ++i) {
      w[static_cast<std::size_t>(h + i)] = spectrum[static_cast<std::size_t>(i + 1)];
      w[static_cast<std::size_t>(h - 1 - i)] = spectrum[static_cast<std::size_t>(i + 1)];
    }
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

/// Separable 2D taper, outer product of chebyshev_1d with itself.
inline WeightGrid chebyshev_2d(int n, const TaperSpec& spec, double spacing = kHalfWavelength) {
  const auto w = chebyshev_1d(n, spec);
  Eigen::Map<const Eigen::VectorXd> v(w.data(), n);
  return {(v * v.transpose()).cast<cplx>(), spacing};
}

/// Half main-lobe width omega = arccos(1 / cosh(arccosh(1/r) / (n - 1))), radians.
inline double half_mainlobe_width(int n_1d, const TaperSpec& spec) {
  if (n_1d < 2) throw invalid_argument("half_mainlobe_width: n_1d must be >= 2");
  return std::acos(1.0 / std::cosh(std::acosh(1.0 / spec.sidelobe_ratio()) / (n_1d - 1)));
}

/// Resolution rho = 0.5 * omega for a co-array at d+ = lambda/2.
inline double resolution(double omega) noexcept { return 0.5 * omega; }

/// NAF offset at which a Chebyshev array factor leaves its main lobe, i.e.
/// where it falls to the sidelobe level: the phase progression reaches 2 omega.
inline double mainlobe_edge_naf(int n_1d, const TaperSpec& spec) {
  return half_mainlobe_width(n_1d, spec) / std::numbers::pi;
}

} // namespace isac
