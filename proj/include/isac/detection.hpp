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

// CA-CFAR detection, peak refinement and successive PSF cancellation on NAF
// images. All neighbourhoods wrap around the grid edges.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "isac/angular.hpp"
#include "isac/beamsynth.hpp"
#include "isac/errors.hpp"
#include "isac/imaging.hpp"

namespace isac {

struct CfarConfig {
  double desired_pfa = 1e-3;
  int guard_cells = 1;    ///< Chebyshev radius of the guard region, per axis
  int training_cells = 1; ///< thickness of the training ring beyond the guard region

  int outer_radius() const noexcept { return guard_cells + training_cells; }

  int training_count() const noexcept {
    const int o = 2 * outer_radius() + 1;
    const int g = 2 * guard_cells + 1;
    return o * o - g * g;
  }

  /// alpha = N_t (P_FA^(-1/N_t) - 1) for exponentially distributed cell power.
  double threshold_factor() const {
    const double nt = training_count();
    return nt * (std::pow(desired_pfa, -1.0 / nt) - 1.0);
  }

  void validate() const {
    if (!(desired_pfa > 0.0 && desired_pfa < 1.0)) throw invalid_argument("CfarConfig: pfa must be in (0, 1)");
    if (guard_cells < 0) throw invalid_argument("CfarConfig: guard_cells must be >= 0");
    if (training_cells < 1) throw invalid_argument("CfarConfig: training_cells must be >= 1");
  }
};

/// Guard radius covering the main lobe of a Chebyshev co-array on the grid.
inline CfarConfig default_cfar(int coarray_n_1d, const TaperSpec& taper, int bins, double pfa = 1e-3) {
  const int guard = static_cast<int>(std::ceil(mainlobe_edge_naf(coarray_n_1d, taper) * bins));
  return {pfa, guard, 1};
}

struct CellHit {
  int i = 0;
  int j = 0;
  double power = 0.0;
};

struct Detection {
  NafPoint position;
  double power = 0.0;
  cplx amplitude{0.0, 0.0};
};

namespace detail {

inline int wrap_index(int k, int n) noexcept { return ((k % n) + n) % n; }

/// Toroidal box sums of half-width r for every cell, via a padded prefix sum.
inline Eigen::MatrixXd box_sums(const Eigen::MatrixXd& p, int r) {
  const int b = static_cast<int>(p.rows());
  const int e = b + 2 * r;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(e + 1, e + 1);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j)
      s(i + 1, j + 1) = p(wrap_index(i - r, b), wrap_index(j - r, b)) + s(i, j + 1) + s(i + 1, j) - s(i, j);
  Eigen::MatrixXd out(b, b);
  const int w = 2 * r + 1;
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) out(i, j) = s(i + w, j + w) - s(i, j + w) - s(i + w, j) + s(i, j);
  return out;
}

} // namespace detail

/// Cells whose power exceeds alpha times the mean of the training ring.
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> cfar_mask(const Eigen::MatrixXd& power,
                                                                     const CfarConfig& cfg) {
  cfg.validate();
  const int b = static_cast<int>(power.rows());
  if (b <= 2 * cfg.outer_radius() + 1) throw invalid_argument("cfar: grid too small for the CFAR window");
  const auto outer = detail::box_sums(power, cfg.outer_radius());
  const auto inner = detail::box_sums(power, cfg.guard_cells);
  const double alpha = cfg.threshold_factor();
  const double nt = cfg.training_count();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) {
      const double ring = std::max(0.0, outer(i, j) - inner(i, j)) / nt;
      mask(i, j) = power(i, j) > alpha * ring && power(i, j) > 0.0;
    }
  return mask;
}

/// Single-cell form of cfar_mask.
inline bool cfar_cell(const NafImage& image, const CfarConfig& cfg, int i, int j) {
  cfg.validate();
  const int b = image.bins_per_axis;
  const int o = cfg.outer_radius();
  if (b <= 2 * o + 1) throw invalid_argument("cfar: grid too small for the CFAR window");
  double ring = 0.0;
  for (int di = -o; di <= o; ++di)
    for (int dj = -o; dj <= o; ++dj) {
      if (std::max(std::abs(di), std::abs(dj)) <= cfg.guard_cells) continue;
      ring += std::norm(image.values(detail::wrap_index(i + di, b), detail::wrap_index(j + dj, b)));
    }
  const double p = std::norm(image.values(i, j));
  return p > cfg.threshold_factor() * ring / cfg.training_count() && p > 0.0;
}

/// CA-CFAR hits; 8-connected groups of flagged cells are merged to their
/// strongest cell. Sorted by power, strongest first.
inline std::vector<CellHit> cfar_detect(const NafImage& image, const CfarConfig& cfg) {
  const Eigen::MatrixXd power = image.power();
  const auto mask = cfar_mask(power, cfg);
  const int b = static_cast<int>(power.rows());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(b, b, false);
  std::vector<CellHit> hits;
  std::vector<std::pair<int, int>> stack;
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) {
      if (!mask(i, j) || seen(i, j)) continue;
      CellHit best{i, j, power(i, j)};
      stack.assign(1, {i, j});
      seen(i, j) = true;
      while (!stack.empty()) {
        auto [ci, cj] = stack.back();
        stack.pop_back();
        if (power(ci, cj) > best.power) best = {ci, cj, power(ci, cj)};
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            const int ni = detail::wrap_index(ci + di, b);
            const int nj = detail::wrap_index(cj + dj, b);
            if (mask(ni, nj) && !seen(ni, nj)) {
              seen(ni, nj) = true;
              stack.emplace_back(ni, nj);
            }
          }
      }
      hits.push_back(best);
    }
  std::stable_sort(hits.begin(), hits.end(), [](const CellHit& a, const CellHit& b) { return a.power > b.power; });
  return hits;
}

/// Sub-cell peak position by 3-point parabolic interpolation of log|pixel| per
/// axis. Falls back to the cell centre on an axis whose neighbours are not
/// strictly smaller.
inline NafPoint refine_peak(const NafImage& image, const CellHit& cell) {
  const int b = image.bins_per_axis;
  auto offset = [&](double left, double mid, double right) {
    if (!(left > 0.0 && right > 0.0 && mid > left && mid > right)) return 0.0;
    const double yl = std::log(left);
    const double y0 = std::log(mid);
    const double yr = std::log(right);
    const double denom = yl - 2.0 * y0 + yr;
    if (!(denom < 0.0)) return 0.0;
    return std::clamp(0.5 * (yl - yr) / denom, -0.5, 0.5);
  };
  const auto& v = image.values;
  const double mid = std::abs(v(cell.i, cell.j));
  const double dl = offset(std::abs(v(detail::wrap_index(cell.i - 1, b), cell.j)), mid,
                           std::abs(v(detail::wrap_index(cell.i + 1, b), cell.j)));
  const double de = offset(std::abs(v(cell.i, detail::wrap_index(cell.j - 1, b))), mid,
                           std::abs(v(cell.i, detail::wrap_index(cell.j + 1, b))));
  const double step = 1.0 / b;
  return wrap(NafPoint{-0.5 + (cell.i + dl) * step, -0.5 + (cell.j + de) * step});
}

/// Joint PSF model used for cancellation: the co-array taper on a grid.
class PsfModel {
public:
  PsfModel(const ArrayPair& pair, const AcquisitionSet& acq, const NafGrid& grid, int window_cells)
      : effective_(effective_weights(pair, acq)), grid_(grid), window_(window_cells) {}

  const NafGrid& grid() const noexcept { return grid_; }
  int window_cells() const noexcept { return window_; }
  int n_1d() const noexcept { return effective_.n_1d(); }

  /// Co-array coefficients of a unit scatterer at v.
  Eigen::MatrixXcd coefficients(NafPoint v) const {
    const int n = effective_.n_1d();
    Eigen::VectorXcd g(n), h(n);
    for (int i = 0; i < n; ++i) {
      g(i) = std::polar(1.0, -kTwoPi * i * v.l);
      h(i) = std::polar(1.0, -kTwoPi * i * v.eta);
    }
    return effective_.values.cwiseProduct(g * h.transpose());
  }

  /// Image of co-array coefficients at the given grid rows/cols.
  Eigen::MatrixXcd render(const Eigen::MatrixXcd& coefficients, std::span<const int> rows,
                          std::span<const int> cols) const {
    const int n = effective_.n_1d();
    std::vector<double> rl, ce;
    for (int r : rows) rl.push_back(grid_.coord(r));
    for (int c : cols) ce.push_back(grid_.coord(c));
    const Eigen::MatrixXcd el = axis_phasors(rl, n, 1.0, 0.0).conjugate();
    const Eigen::MatrixXcd ee = axis_phasors(ce, n, 1.0, 0.0).conjugate();
    return el * coefficients * ee.transpose();
  }

  /// PSF centred at v, evaluated at rows/cols given by grid indices.
  Eigen::MatrixXcd shifted(NafPoint v, std::span<const int> rows, std::span<const int> cols) const {
    return render(coefficients(v), rows, cols);
  }

  Eigen::MatrixXcd shifted_full(NafPoint v) const {
    std::vector<int> all(static_cast<std::size_t>(grid_.bins_per_axis));
    for (int i = 0; i < grid_.bins_per_axis; ++i) all[static_cast<std::size_t>(i)] = i;
    return shifted(v, all, all);
  }

private:
  WeightGrid effective_;
  NafGrid grid_;
  int window_;
};

/// Least-squares amplitude of the PSF at det.position against the image, over
/// a square window of +-window_cells around the detection.
inline cplx fit_amplitude(const NafImage& image, NafPoint position, const PsfModel& model) {
  const auto& g = model.grid();
  const int b = g.bins_per_axis;
  const int ci = g.nearest(position.l);
  const int cj = g.nearest(position.eta);
  const int w = std::min(model.window_cells(), (b - 1) / 2);
  std::vector<int> rows, cols;
  for (int k = -w; k <= w; ++k) {
    rows.push_back(detail::wrap_index(ci + k, b));
    cols.push_back(detail::wrap_index(cj + k, b));
  }
  const auto psf = model.shifted(position, rows, cols);
  cplx num{0.0, 0.0};
  double den = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const cplx p = psf(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      num += std::conj(p) * image.values(rows[r], cols[c]);
      den += std::norm(p);
    }
  if (!(den > 0.0)) throw internal_error("fit_amplitude: PSF has no energy in the fit window");
  return num / den;
}

/// Removes amplitude * PSF(det.position) from the whole image.
inline NafImage cancel_target(const NafImage& image, const Detection& det, const PsfModel& model) {
  NafImage out = image;
  out.values -= det.amplitude * model.shifted_full(det.position);
  return out;
}

namespace detail {

/// Steepest ascent on |pixel| from a cell, at most max_steps moves.
inline CellHit climb(const NafImage& image, CellHit c, int max_steps) {
  const int b = image.bins_per_axis;
  c.power = std::norm(image.values(c.i, c.j));
  for (int step = 0; step < max_steps; ++step) {
    CellHit best = c;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        const int i = wrap_index(c.i + di, b);
        const int j = wrap_index(c.j + dj, b);
        const double p = std::norm(image.values(i, j));
        if (p > best.power) best = {i, j, p};
      }
    if (best.i == c.i && best.j == c.j) break;
    c = best;
  }
  return c;
}

} // namespace detail

/// CFAR runs once on the input image; its peaks are taken strongest first
/// (at most max_targets). Each peak is re-located on the image with all
/// earlier detections removed, kept only if it still passes CFAR there, then
/// refined, fitted and cancelled.
///
/// Same result as calling cancel_target after every detection, but only the
/// patch around each later peak is re-rendered.
inline std::vector<Detection> detect_all(const NafImage& image, const CfarConfig& cfg, const PsfModel& model,
                                         int max_targets) {
  auto hits = cfar_detect(image, cfg);
  if (static_cast<int>(hits.size()) > max_targets) hits.resize(static_cast<std::size_t>(std::max(0, max_targets)));
  std::vector<Detection> out;
  const int b = image.bins_per_axis;
  const int max_steps = std::max(1, cfg.guard_cells / 2);
  const int reach = max_steps + std::max(cfg.outer_radius(), model.window_cells() + 1) + 1;
  NafImage work = image; // valid only inside the patch last refreshed
  Eigen::MatrixXcd removed = Eigen::MatrixXcd::Zero(model.n_1d(), model.n_1d());
  std::vector<int> idx_r, idx_c;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    CellHit cell = hits[k];
    if (!out.empty()) {
      const int span = std::min(2 * reach + 1, b);
      idx_r.clear();
      idx_c.clear();
      for (int t = 0; t < span; ++t) {
        idx_r.push_back(detail::wrap_index(cell.i - reach + t, b));
        idx_c.push_back(detail::wrap_index(cell.j - reach + t, b));
      }
      const auto model_patch = model.render(removed, idx_r, idx_c);
      for (int r = 0; r < span; ++r)
        for (int c = 0; c < span; ++c)
          work.values(idx_r[static_cast<std::size_t>(r)], idx_c[static_cast<std::size_t>(c)]) =
              image.values(idx_r[static_cast<std::size_t>(r)], idx_c[static_cast<std::size_t>(c)]) -
              model_patch(r, c);
      cell = detail::climb(work, cell, max_steps);
      if (!cfar_cell(work, cfg, cell.i, cell.j)) continue;
    }
    Detection d;
    d.position = refine_peak(work, cell);
    d.amplitude = fit_amplitude(work, d.position, model);
    d.power = std::norm(d.amplitude);
    out.push_back(d);
    removed += d.amplitude * model.coefficients(d.position);
  }
  return out;
}

struct MatchResult {
  int hits = 0;
  int misses = 0;
  int false_alarms = 0;
};

/// Greedy nearest-first one-to-one matching within radius on the torus.
inline MatchResult match_truth(std::span<const Detection> dets, const Scenario& scenario, double radius) {
  if (!(radius > 0.0)) throw invalid_argument("match_truth: radius must be positive");
  struct Candidate {
    double dist;
    std::size_t det;
    std::size_t truth;
  };
  std::vector<Candidate> cand;
  for (std::size_t d = 0; d < dets.size(); ++d)
    for (std::size_t t = 0; t < scenario.targets.size(); ++t) {
      const double dist = toroidal_distance(dets[d].position, scenario.targets[t].position);
      if (dist <= radius) cand.push_back({dist, d, t});
    }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  std::vector<bool> det_used(dets.size(), false), truth_used(scenario.targets.size(), false);
  MatchResult r;
  for (const auto& c : cand) {
    if (det_used[c.det] || truth_used[c.truth]) continue;
    det_used[c.det] = truth_used[c.truth] = true;
    ++r.hits;
  }
  r.misses = static_cast<int>(scenario.targets.size()) - r.hits;
  r.false_alarms = static_cast<int>(dets.size()) - r.hits;
  return r;
}

} // namespace isac
