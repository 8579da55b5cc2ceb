// SPDX-License-Identifier: Apache-2.0
//
// Closed-form Euclidean conjugate gradient of the grid-averaged CRB
// objective with respect to the masked analog combiner.
//
// Convention: for the real objective f, the first-order change under a
// perturbation D of the masked entries is 2*Re{tr(grad^H D)}. Under that
// pairing the gradient is
//   grad f = 2*gamma * sum_jk ((J + K - Q - Q^H) W_RF) .* P
// with J = A1 T A1^H, K = A2 F22^-1 F21 T F12 F22^-1 A2^H,
// Q = A2 F22^-1 F21 T A1^H and T = -(F11 - F12 F22^-1 F21)^-2. Each factor
// is rank <= 2, so the per-point cost is O(N_BS * N_RF * N); the N_BS^2
// matrices are never formed.

#pragma once

#include <Eigen/Dense>

#include "crbmo/combiner.hpp"
#include "crbmo/crb.hpp"

namespace crbmo {

/// Low-rank factors of the per-point gradient terms: each of J, K, Q is
/// reconstructed as left * right^H with n_bs x 2 factors.
struct GradientTerms {
  Matrix2d t_mat;               // T = -(Schur)^-2
  MatrixXcd j_left, j_right;    // J = j_left j_right^H
  MatrixXcd k_left, k_right;    // K = k_left k_right^H
  MatrixXcd q_left, q_right;    // Q = q_left q_right^H
};

/// Assembles T and the factor pairs from one angle's Fisher blocks.
/// Throws SingularFisher when the Schur complement is singular.
GradientTerms build_gradient_terms(const FisherBlocks& blocks, const DerivativeMatrixA& a);

/// Masked Euclidean gradient summed over the grid (fixed row-major order).
/// Throws SingularFisher at the first singular grid point.
MatrixXcd euclidean_gradient(const MatrixXcd& w_rf, int n_rf, const SteeringCache& cache,
                             double sigma2, const MatrixXd& mask);
MatrixXcd euclidean_gradient(const CombinerSet& combiners, const AngleGrid& grid,
                             const UpaGeometry& geom, double sigma2);

/// Gradient and objective from one pass over the grid (the Schur factors are
/// shared). Throws SingularFisher.
struct GradientResult {
  MatrixXcd gradient;
  double value = 0.0;
};
GradientResult objective_and_gradient(const MatrixXcd& w_rf, int n_rf,
                                      const SteeringCache& cache, double sigma2,
                                      const MatrixXd& mask);

}  // namespace crbmo
