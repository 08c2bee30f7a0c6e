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

// Joint transmit/receive beam synthesis.
//
// The joint response of a Tx grid C and an Rx grid S depends only on the
// co-array coefficients conv2(C, up_m(S)). A desired co-array taper is realized
// as a sum of Q such products (component images), found by alternating least
// squares. Acquisitions use a fixed gauge: every Tx grid has unit L2 norm and a
// real positive largest entry, so the Rx grids carry the remaining scale and
// sum_q |rx_q|^2 is the post-beamforming noise gain.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "isac/angular.hpp"
#include "isac/errors.hpp"
#include "isac/geometry.hpp"
#include "isac/rng.hpp"
#include "isac/windowing.hpp"

namespace isac {

struct AcquisitionSet {
  std::vector<WeightGrid> tx_weights;
  std::vector<WeightGrid> rx_weights;
  double residual = 0.0;

  int q_count() const noexcept { return static_cast<int>(tx_weights.size()); }

  /// sum_q |rx_q|^2, the factor by which receiver noise power is scaled.
  double noise_gain() const {
    double g = 0.0;
    for (const auto& w : rx_weights) g += w.values.squaredNorm();
    return g;
  }
};

class convergence_failure : public std::runtime_error {
public:
  convergence_failure(const std::string& what, AcquisitionSet best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const AcquisitionSet& best_attempt() const noexcept { return best_; }

private:
  AcquisitionSet best_;
};

/// Co-array coefficients sum_q conv2(tx_q, up_m(rx_q)) on the d+ lattice.
inline WeightGrid effective_weights(const ArrayPair& pair, const AcquisitionSet& acq) {
  const auto dims = coarray_dims(pair);
  const int nc = pair.comms.n_1d;
  const int ns = pair.sensing.n_1d;
  const int sc = lattice_step(pair.comms, dims.spacing);
  const int ss = lattice_step(pair.sensing, dims.spacing);
  if (acq.rx_weights.size() != acq.tx_weights.size())
    throw invalid_argument("effective_weights: tx/rx acquisition count mismatch");

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dims.n_1d, dims.n_1d);
  for (std::size_t q = 0; q < acq.tx_weights.size(); ++q) {
    const auto& c = acq.tx_weights[q].values;
    const auto& s = acq.rx_weights[q].values;
    if (c.rows() != nc || c.cols() != nc || s.rows() != ns || s.cols() != ns)
      throw invalid_argument("effective_weights: weight grid does not match array size");
    if (sc == 1) {
      // Rx upsampled by m, convolved with the contiguous Tx block.
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b)
          if (s(a, b) != cplx{}) out.block(a * ss, b * ss, nc, nc).noalias() += s(a, b) * c;
      continue;
    }
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j)
        for (int a = 0; a < ns; ++a)
          for (int b = 0; b < ns; ++b) out(i * sc + a * ss, j * sc + b * ss) += c(i, j) * s(a, b);
  }
  return {out, dims.spacing};
}

struct FactorizeOptions {
  std::uint64_t seed = 1;
  int restarts = 10;
  int max_iterations = 500;
  double change_tolerance = 1e-10; ///< stop when the relative residual moves less than this
};

namespace detail {

/// Bilinear model y[tx_off[a] + rx_off[b]] += sum_q c_q[a] s_q[b] on a flat
/// output vector. 1D axis factorization and direct 2D factorization are both
/// instances (2D offsets are row-major flattened, which stays additive because
/// sums never leave the co-array).
struct BilinearModel {
  Eigen::Index out_size = 0;
  std::vector<Eigen::Index> tx_off;
  std::vector<Eigen::Index> rx_off;
};

struct BilinearFit {
  std::vector<Eigen::VectorXcd> tx;
  std::vector<Eigen::VectorXcd> rx;
  double residual = std::numeric_limits<double>::infinity();
};

inline Eigen::VectorXcd bilinear_eval(const BilinearModel& m, const std::vector<Eigen::VectorXcd>& tx,
                                      const std::vector<Eigen::VectorXcd>& rx) {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(m.out_size);
  for (std::size_t q = 0; q < tx.size(); ++q)
    for (std::size_t a = 0; a < m.tx_off.size(); ++a)
      for (std::size_t b = 0; b < m.rx_off.size(); ++b)
        y(m.tx_off[a] + m.rx_off[b]) += tx[q](static_cast<Eigen::Index>(a)) * rx[q](static_cast<Eigen::Index>(b));
  return y;
}

/// Design matrix for the "solve" side given the "fixed" side.
inline Eigen::MatrixXcd bilinear_design(Eigen::Index out_size, const std::vector<Eigen::Index>& solve_off,
                                        const std::vector<Eigen::Index>& fixed_off,
                                        const std::vector<Eigen::VectorXcd>& fixed) {
  const auto n = static_cast<Eigen::Index>(solve_off.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(out_size, n * static_cast<Eigen::Index>(fixed.size()));
  for (std::size_t q = 0; q < fixed.size(); ++q)
    for (Eigen::Index a = 0; a < n; ++a)
      for (std::size_t b = 0; b < fixed_off.size(); ++b)
        m(solve_off[static_cast<std::size_t>(a)] + fixed_off[b], static_cast<Eigen::Index>(q) * n + a) +=
            fixed[q](static_cast<Eigen::Index>(b));
  return m;
}

inline std::vector<Eigen::VectorXcd> split(const Eigen::VectorXcd& x, std::size_t parts) {
  const auto n = x.size() / static_cast<Eigen::Index>(parts);
  std::vector<Eigen::VectorXcd> out(parts);
  for (std::size_t q = 0; q < parts; ++q) out[q] = x.segment(static_cast<Eigen::Index>(q) * n, n);
  return out;
}

/// Alternating least squares with random complex Gaussian restarts.
inline BilinearFit als_fit(const BilinearModel& m, const Eigen::VectorXcd& target, int q,
                           const FactorizeOptions& opt, Engine& rng) {
  const double tnorm = target.norm();
  BilinearFit best;
  for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
    std::vector<Eigen::VectorXcd> tx(static_cast<std::size_t>(q)), rx(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) {
      tx[static_cast<std::size_t>(k)].resize(static_cast<Eigen::Index>(m.tx_off.size()));
      rx[static_cast<std::size_t>(k)].resize(static_cast<Eigen::Index>(m.rx_off.size()));
      for (auto& v : tx[static_cast<std::size_t>(k)]) v = complex_normal(rng, 1.0);
      for (auto& v : rx[static_cast<std::size_t>(k)]) v = complex_normal(rng, 1.0);
    }
    double prev = std::numeric_limits<double>::infinity();
    double res = prev;
    for (int it = 0; it < opt.max_iterations; ++it) {
      const auto mt = bilinear_design(m.out_size, m.tx_off, m.rx_off, rx);
      tx = split(mt.completeOrthogonalDecomposition().solve(target), tx.size());
      const auto mr = bilinear_design(m.out_size, m.rx_off, m.tx_off, tx);
      rx = split(mr.completeOrthogonalDecomposition().solve(target), rx.size());
      res = (bilinear_eval(m, tx, rx) - target).norm() / tnorm;
      if (!std::isfinite(res)) break;
      if (std::abs(prev - res) < opt.change_tolerance || res < 1e-14) break;
      prev = res;
    }
    if (std::isfinite(res) && res < best.residual) best = {tx, rx, res};
    if (best.residual < 1e-13) break;
  }
  return best;
}

/// Unit-norm Tx with a real positive largest entry; Rx absorbs the inverse.
inline void apply_gauge(Eigen::Ref<Eigen::VectorXcd> tx, Eigen::Ref<Eigen::VectorXcd> rx) {
  const double n = tx.norm();
  if (n == 0.0) {
    rx.setZero();
    return;
  }
  Eigen::Index k = 0;
  tx.cwiseAbs().maxCoeff(&k);
  const cplx g = std::polar(n, std::arg(tx(k)));
  tx /= g;
  rx *= g;
}

inline std::vector<int> q_schedule(int cap) {
  std::vector<int> s;
  for (int q = 1; q < cap; q *= 2) s.push_back(q);
  s.push_back(std::max(cap, 1));
  return s;
}

inline double relative_error(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want) {
  const double n = want.norm();
  return n == 0.0 ? got.norm() : (got - want).norm() / n;
}

} // namespace detail

/// Factorizes a desired co-array taper into Tx/Rx acquisitions.
///
/// Separable tapers (rank one) are factorized per axis with Q1 component pairs
/// and combined as all Q1^2 outer products; other tapers fall back to direct 2D
/// alternating least squares. Q1 (or Q) follows a doubling search capped at the
/// sensing size, and the first candidate reaching `tol` is returned. Throws
/// convergence_failure with the best attempt when no candidate within `q_max`
/// gets there.
inline AcquisitionSet factorize(const ArrayPair& pair, const WeightGrid& desired, int q_max, double tol,
                                const FactorizeOptions& opt = {}) {
  const auto dims = coarray_dims(pair);
  if (desired.values.rows() != dims.n_1d || desired.values.cols() != dims.n_1d)
    throw invalid_argument("factorize: desired taper does not match the co-array size");
  if (!(tol > 0.0)) throw invalid_argument("factorize: tol must be positive");
  if (q_max < 1) throw invalid_argument("factorize: q_max must be >= 1");
  if (desired.values.norm() == 0.0) throw invalid_argument("factorize: desired taper is zero");

  const int nc = pair.comms.n_1d;
  const int ns = pair.sensing.n_1d;
  const int sc = lattice_step(pair.comms, dims.spacing);
  const int ss = lattice_step(pair.sensing, dims.spacing);
  Engine rng{derive_seed(opt.seed, {0x66616374ULL})};

  AcquisitionSet best;
  best.residual = std::numeric_limits<double>::infinity();
  auto consider = [&](AcquisitionSet&& acq) -> bool {
    acq.residual = detail::relative_error(effective_weights(pair, acq).values, desired.values);
    const bool ok = acq.residual <= tol;
    if (acq.residual < best.residual) best = std::move(acq);
    return ok;
  };

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(desired.values, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const bool separable = sv.size() < 2 || sv(1) <= 1e-12 * sv(0);

  if (separable) {
    // desired = s0 u v^H = t_x t_z^T
    const double root = std::sqrt(sv(0));
    const Eigen::VectorXcd t_x = svd.matrixU().col(0) * root;
    const Eigen::VectorXcd t_z = svd.matrixV().col(0).conjugate() * root;

    detail::BilinearModel m1{dims.n_1d, {}, {}};
    for (int a = 0; a < nc; ++a) m1.tx_off.push_back(static_cast<Eigen::Index>(a) * sc);
    for (int b = 0; b < ns; ++b) m1.rx_off.push_back(static_cast<Eigen::Index>(b) * ss);

    for (int q1 : detail::q_schedule(ns)) {
      if (q1 * q1 > q_max) break;
      auto fx = detail::als_fit(m1, t_x, q1, opt, rng);
      auto fz = detail::als_fit(m1, t_z, q1, opt, rng);
      for (int k = 0; k < q1; ++k) {
        detail::apply_gauge(fx.tx[static_cast<std::size_t>(k)], fx.rx[static_cast<std::size_t>(k)]);
        detail::apply_gauge(fz.tx[static_cast<std::size_t>(k)], fz.rx[static_cast<std::size_t>(k)]);
      }
      AcquisitionSet acq;
      for (int a = 0; a < q1; ++a)
        for (int b = 0; b < q1; ++b) {
          const auto ua = static_cast<std::size_t>(a);
          const auto ub = static_cast<std::size_t>(b);
          acq.tx_weights.push_back({fx.tx[ua] * fz.tx[ub].transpose(), pair.comms.spacing});
          acq.rx_weights.push_back({fx.rx[ua] * fz.rx[ub].transpose(), pair.sensing.spacing});
        }
      if (consider(std::move(acq))) return best;
    }
  } else {
    const Eigen::Index n = dims.n_1d;
    detail::BilinearModel m2{n * n, {}, {}};
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) m2.tx_off.push_back(static_cast<Eigen::Index>(i) * sc * n + j * sc);
    for (int a = 0; a < ns; ++a)
      for (int b = 0; b < ns; ++b) m2.rx_off.push_back(static_cast<Eigen::Index>(a) * ss * n + b * ss);
    // Row-major flattening of the desired grid.
    Eigen::VectorXcd target(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) target(i * n + j) = desired.values(i, j);

    for (int q : detail::q_schedule(ns * ns)) {
      if (q > q_max) break;
      auto f = detail::als_fit(m2, target, q, opt, rng);
      AcquisitionSet acq;
      for (int k = 0; k < q; ++k) {
        auto& tx = f.tx[static_cast<std::size_t>(k)];
        auto& rx = f.rx[static_cast<std::size_t>(k)];
        detail::apply_gauge(tx, rx);
        Eigen::MatrixXcd c(nc, nc), s(ns, ns);
        for (int i = 0; i < nc; ++i)
          for (int j = 0; j < nc; ++j) c(i, j) = tx(i * nc + j);
        for (int a = 0; a < ns; ++a)
          for (int b = 0; b < ns; ++b) s(a, b) = rx(a * ns + b);
        acq.tx_weights.push_back({c, pair.comms.spacing});
        acq.rx_weights.push_back({s, pair.sensing.spacing});
      }
      if (consider(std::move(acq))) return best;
    }
  }
  throw convergence_failure("factorize: no Q <= " + std::to_string(q_max) + " reached residual " +
                                std::to_string(tol) + " (best " + std::to_string(best.residual) + ")",
                            std::move(best));
}

/// Response over a grid for a fixed scan direction, value(v) at image (i, j).
struct PsfMap {
  Eigen::MatrixXcd values;
  NafPoint scan;
};

namespace detail {

/// sum_{i,j} w(i,j) exp(j 2 pi step (i (u_l - l) + j (u_eta - eta))) on the grid.
inline Eigen::MatrixXcd lattice_response(const Eigen::MatrixXcd& w, double step, NafPoint scan,
                                         const NafGrid& grid) {
  const auto axis = grid_axis(grid);
  const auto el = axis_phasors(axis, static_cast<int>(w.rows()), step, scan.l);
  const auto ee = axis_phasors(axis, static_cast<int>(w.cols()), step, scan.eta);
  return el * w * ee.transpose();
}

} // namespace detail

/// PSF of one URA with weights W scanned to u: sum_n w_n conj(a_n(u)) a_n(v).
inline PsfMap single_psf(const ArrayGeometry& geom, const WeightGrid& weights, NafPoint scan, const NafGrid& grid,
                         double reference_spacing = kHalfWavelength) {
  if (weights.values.rows() != geom.n_1d || weights.values.cols() != geom.n_1d)
    throw invalid_argument("single_psf: weight grid does not match geometry");
  return {detail::lattice_response(weights.values, geom.spacing / reference_spacing, scan, grid), scan};
}

/// Joint PSF: sum over acquisitions of the pointwise Tx x Rx product.
inline PsfMap joint_psf(const ArrayPair& pair, const AcquisitionSet& acq, NafPoint scan, const NafGrid& grid) {
  const double ref = coarray_dims(pair).spacing;
  const int b = grid.bins_per_axis;
  PsfMap out{Eigen::MatrixXcd::Zero(b, b), scan};
  for (int q = 0; q < acq.q_count(); ++q) {
    const auto c = single_psf(pair.comms, acq.tx_weights[static_cast<std::size_t>(q)], scan, grid, ref);
    const auto s = single_psf(pair.sensing, acq.rx_weights[static_cast<std::size_t>(q)], scan, grid, ref);
    out.values += c.values.cwiseProduct(s.values);
  }
  return out;
}

/// The joint PSF evaluated through the co-array: single_psf of the virtual URA.
inline PsfMap coarray_psf(const ArrayPair& pair, const AcquisitionSet& acq, NafPoint scan, const NafGrid& grid) {
  const auto eff = effective_weights(pair, acq);
  return single_psf(coarray_geometry(pair), eff, scan, grid, eff.spacing);
}

inline Eigen::MatrixXd power_db(const Eigen::MatrixXcd& values, double reference) {
  constexpr double floor_db = -300.0;
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double p = std::norm(values(i, j)) / reference;
      out(i, j) = p > 0.0 ? std::max(floor_db, 10.0 * std::log10(p)) : floor_db;
    }
  return out;
}

/// Main-lobe extent along each axis: steps from the peak to the first local
/// minimum of |value| (first null), measured in grid cells.
struct LobeExtent {
  int peak_i = 0;
  int peak_j = 0;
  int half_l = 0;
  int half_eta = 0;
};

inline LobeExtent mainlobe_extent(const Eigen::MatrixXcd& v) {
  LobeExtent e;
  const Eigen::MatrixXd mag = v.cwiseAbs();
  mag.maxCoeff(&e.peak_i, &e.peak_j);
  const int b = static_cast<int>(v.rows());
  auto walk = [&](int di, int dj) {
    int k = 0;
    double prev = mag(e.peak_i, e.peak_j);
    while (k < b / 2) {
      const int i = ((e.peak_i + di * (k + 1)) % b + b) % b;
      const int j = ((e.peak_j + dj * (k + 1)) % b + b) % b;
      if (mag(i, j) >= prev) break;
      prev = mag(i, j);
      ++k;
    }
    return k;
  };
  e.half_l = std::max(walk(1, 0), walk(-1, 0));
  e.half_eta = std::max(walk(0, 1), walk(0, -1));
  return e;
}

/// Peak sidelobe in dB relative to the peak: maximum power outside the
/// main-lobe rectangle bounded by the first nulls.
inline double peak_sidelobe_db(const PsfMap& psf) {
  const auto e = mainlobe_extent(psf.values);
  const int b = static_cast<int>(psf.values.rows());
  const double peak = std::norm(psf.values(e.peak_i, e.peak_j));
  double side = 0.0;
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) {
      const int di = std::abs(wrap_naf(static_cast<double>(i - e.peak_i) / b)) * b + 0.5;
      const int dj = std::abs(wrap_naf(static_cast<double>(j - e.peak_j) / b)) * b + 0.5;
      if (di <= e.half_l && dj <= e.half_eta) continue;
      side = std::max(side, std::norm(psf.values(i, j)));
    }
  return side > 0.0 ? 10.0 * std::log10(side / peak) : -300.0;
}

} // namespace isac
