// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations, independent of the library's
// computation paths: finite differences, brute-force channel assembly, the
// unsimplified Fisher matrix, and dense gradient-term reconstruction.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "crbmo/array_geometry.hpp"
#include "crbmo/channel.hpp"
#include "crbmo/combiner.hpp"
#include "crbmo/crb.hpp"
#include "crbmo/rng.hpp"

namespace oracles {

using crbmo::AnglePair;
using crbmo::Complex;
using crbmo::MatrixXcd;
using crbmo::UpaGeometry;
using crbmo::VectorXcd;

// central finite difference of the steering vector in theta
inline VectorXcd fd_steering_dtheta(const UpaGeometry& g, const AnglePair& x, double h) {
  return (crbmo::steering(g, {x.theta + h, x.phi}) -
          crbmo::steering(g, {x.theta - h, x.phi})) /
         (2.0 * h);
}

inline VectorXcd fd_steering_dphi(const UpaGeometry& g, const AnglePair& x, double h) {
  return (crbmo::steering(g, {x.theta, x.phi + h}) -
          crbmo::steering(g, {x.theta, x.phi - h})) /
         (2.0 * h);
}

// element-by-element double loop over antenna indices; no matrix algebra
inline MatrixXcd brute_force_channel(const UpaGeometry& geom, const crbmo::UeConfig& ue,
                                     const std::vector<crbmo::PathParams>& paths) {
  const int n_bs = geom.n_bs();
  const double norm = std::sqrt(static_cast<double>(n_bs) * ue.n_ue /
                                static_cast<double>(paths.size()));
  MatrixXcd h = MatrixXcd::Zero(n_bs, ue.n_ue);
  for (int row = 0; row < n_bs; ++row) {
    const int p = row % geom.p_rows;
    const int q = row / geom.p_rows;
    for (int col = 0; col < ue.n_ue; ++col) {
      Complex sum = 0.0;
      for (const auto& path : paths) {
        const double by =
            M_PI * q * std::sin(path.doa.theta) * std::sin(path.doa.phi);
        const double bz = M_PI * p * std::cos(path.doa.phi);
        const Complex a_bs = std::polar(1.0 / std::sqrt(static_cast<double>(n_bs)), by + bz);
        const Complex a_ue =
            std::polar(1.0 / std::sqrt(static_cast<double>(ue.n_ue)),
                       M_PI * col * std::sin(path.dod_psi));
        sum += path.alpha * a_bs * std::conj(a_ue);
      }
      h(row, col) = norm * sum;
    }
  }
  return h;
}

// blkdiag(W_RF,0, ..., W_RF,N-1), (n_bs*N) x (n_rf*N)
inline MatrixXcd stack_block_diagonal(const crbmo::CombinerSet& c) {
  const auto& lay = c.layout();
  MatrixXcd w = MatrixXcd::Zero(static_cast<Eigen::Index>(lay.n_bs) * lay.n_snapshots,
                                lay.n_columns());
  for (int n = 0; n < lay.n_snapshots; ++n)
    w.block(static_cast<Eigen::Index>(n) * lay.n_bs,
            static_cast<Eigen::Index>(n) * lay.n_rf, lay.n_bs, lay.n_rf) =
        c.snapshot_block(n);
  return w;
}

// F = (2/sigma2) Re{A^H W (W_hat^H W_hat)^-1 W^H A} with W = W_RF W_BB,
// W_hat = blkdiag(W_RF,n) W_BB -- the pre-simplification form.
inline Eigen::Matrix4d fisher_unsimplified(const crbmo::CombinerSet& c,
                                           const crbmo::DerivativeMatrixA& a,
                                           const MatrixXcd& w_bb, double sigma2) {
  const MatrixXcd w = c.w_rf() * w_bb;
  const MatrixXcd w_hat = stack_block_diagonal(c) * w_bb;
  const MatrixXcd gram = w_hat.adjoint() * w_hat;
  const MatrixXcd mid = w * gram.inverse() * w.adjoint();
  return (2.0 / sigma2) * (a.a_mat.adjoint() * mid * a.a_mat).real();
}

// random invertible block-diagonal digital stage
inline MatrixXcd random_block_diag_wbb(const crbmo::CombinerLayout& lay, crbmo::Rng& rng) {
  MatrixXcd w = MatrixXcd::Zero(lay.n_columns(), lay.n_columns());
  for (int n = 0; n < lay.n_snapshots; ++n) {
    MatrixXcd blk(lay.n_rf, lay.n_rf);
    for (int r = 0; r < lay.n_rf; ++r)
      for (int col = 0; col < lay.n_rf; ++col) blk(r, col) = rng.complex_normal(1.0);
    blk += 2.0 * MatrixXcd::Identity(lay.n_rf, lay.n_rf);  // keep it invertible
    w.block(static_cast<Eigen::Index>(n) * lay.n_rf, static_cast<Eigen::Index>(n) * lay.n_rf,
            lay.n_rf, lay.n_rf) = blk;
  }
  return w;
}

// random unit-Frobenius perturbation supported on the mask
inline MatrixXcd random_masked_direction(const crbmo::MatrixXd& mask, crbmo::Rng& rng) {
  MatrixXcd d = MatrixXcd::Zero(mask.rows(), mask.cols());
  for (Eigen::Index c = 0; c < mask.cols(); ++c)
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
      if (mask(r, c) != 0.0) d(r, c) = rng.complex_normal(1.0);
  return d / d.norm();
}

}  // namespace oracles
