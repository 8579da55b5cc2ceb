// SPDX-License-Identifier: Apache-2.0

#include "crbmo/gradient.hpp"

#include <cmath>
#include <string>

namespace crbmo {

using detail::inv2x2;
using detail::sym2x2_cond;
using Matrix2cd = Eigen::Matrix2cd;

GradientTerms build_gradient_terms(const FisherBlocks& blocks, const DerivativeMatrixA& a) {
  if (sym2x2_cond(blocks.f22) > kSingularCondLimit)
    throw SingularFisher("build_gradient_terms: singular F22");
  const Matrix2d f22i = inv2x2(blocks.f22);
  const Matrix2d schur = blocks.f11 - blocks.f12 * f22i * blocks.f21;
  if (sym2x2_cond(schur) > kSingularCondLimit)
    throw SingularFisher("build_gradient_terms: singular Schur complement");
  const Matrix2d si = inv2x2(schur);

  GradientTerms out;
  out.t_mat = -(si * si);
  const Matrix2d g_q = f22i * blocks.f21 * out.t_mat;
  const Matrix2d g_k = g_q * blocks.f12 * f22i;
  const MatrixXcd a1b = a.a1_block();
  const MatrixXcd a2b = a.a2_block();
  out.j_left = a1b;
  out.j_right = a1b * out.t_mat.transpose();
  out.k_left = a2b;
  out.k_right = a2b * g_k.transpose();
  out.q_left = a2b;
  out.q_right = a1b * g_q.transpose();
  return out;
}

namespace {

struct GridAccumulator {
  MatrixXcd grad;
  double value = 0.0;
};

// One pass over the grid at beta = 1, accumulating sum_jk (M_jk W) and the
// objective. The 2*gamma prefactor and mask are applied by the caller.
GridAccumulator accumulate_grid(const MatrixXcd& w_rf, int n_rf,
                                const SteeringCache& cache, double sigma2) {
  const AngleGrid& grid = cache.grid();
  const Eigen::Index n = w_rf.rows();
  const Eigen::Index m = w_rf.cols();
  const double gamma2 = 2.0 * n_rf / (sigma2 * static_cast<double>(n));

  GridAccumulator acc;
  acc.grad = MatrixXcd::Zero(n, m);
  SteeringCache::Point scratch;
  MatrixXcd a1b(n, 2), a2b(n, 2);
  Eigen::Matrix<Complex, 2, Eigen::Dynamic> u1h(2, m), u2h(2, m), x1(2, m), x2(2, m);

  for (int j = 0; j < grid.j_count; ++j) {
    for (int k = 0; k < grid.k_count; ++k) {
      const auto& pt = cache.point(j, k, scratch);
      const VectorXcd u1 = w_rf.adjoint() * pt.a1;
      const VectorXcd u2 = w_rf.adjoint() * pt.a2;
      const VectorXcd u = w_rf.adjoint() * pt.a;

      Matrix2d f11;
      f11 << u1.squaredNorm(), u1.dot(u2).real(), u1.dot(u2).real(), u2.squaredNorm();
      f11 *= gamma2;
      const Complex c1 = u1.dot(u);
      const Complex c2 = u2.dot(u);
      Matrix2d f12;
      f12 << c1.real(), -c1.imag(), c2.real(), -c2.imag();
      f12 *= gamma2;
      const double f22_diag = gamma2 * u.squaredNorm();
      if (!(f22_diag > 0.0) || !std::isfinite(f22_diag))
        throw SingularFisher("euclidean_gradient: singular F22 at grid point (" +
                             std::to_string(grid.theta_at(j)) + ", " +
                             std::to_string(grid.phi_at(k)) + ")");
      const Matrix2d f22i = Matrix2d::Identity() / f22_diag;
      const Matrix2d schur = f11 - f12 * f22i * f12.transpose();
      if (sym2x2_cond(schur) > kSingularCondLimit)
        throw SingularFisher("euclidean_gradient: singular Schur complement at (" +
                             std::to_string(grid.theta_at(j)) + ", " +
                             std::to_string(grid.phi_at(k)) + ")");
      const Matrix2d si = inv2x2(schur);
      acc.value += si(0, 0) + si(1, 1);
      const Matrix2d t = -(si * si);
      const Matrix2d g_q = f22i * f12.transpose() * t;
      const Matrix2d g_k = g_q * f12 * f22i;

      a1b.col(0) = pt.a1;
      a1b.col(1) = pt.a2;
      a2b.col(0) = pt.a;
      a2b.col(1) = Complex(0.0, 1.0) * pt.a;
      u1h.row(0) = u1.adjoint();
      u1h.row(1) = u2.adjoint();
      u2h.row(0) = u.adjoint();
      u2h.row(1) = Complex(0.0, -1.0) * u.adjoint();

      const Matrix2cd tc = t.cast<Complex>();
      const Matrix2cd gqc = g_q.cast<Complex>();
      const Matrix2cd gkc = g_k.cast<Complex>();
      x1.noalias() = tc * u1h;
      x1.noalias() -= gqc.transpose() * u2h;
      x2.noalias() = gkc * u2h;
      x2.noalias() -= gqc * u1h;
      acc.grad.noalias() += a1b * x1;
      acc.grad.noalias() += a2b * x2;
    }
  }
  acc.grad *= gamma2;  // 2*gamma
  return acc;
}

}  // namespace

GradientResult objective_and_gradient(const MatrixXcd& w_rf, int n_rf,
                                      const SteeringCache& cache, double sigma2,
                                      const MatrixXd& mask) {
  auto acc = accumulate_grid(w_rf, n_rf, cache, sigma2);
  GradientResult out;
  out.gradient = acc.grad.cwiseProduct(mask.cast<Complex>());
  out.value = acc.value;
  return out;
}

MatrixXcd euclidean_gradient(const MatrixXcd& w_rf, int n_rf, const SteeringCache& cache,
                             double sigma2, const MatrixXd& mask) {
  return objective_and_gradient(w_rf, n_rf, cache, sigma2, mask).gradient;
}

MatrixXcd euclidean_gradient(const CombinerSet& combiners, const AngleGrid& grid,
                             const UpaGeometry& geom, double sigma2) {
  SteeringCache cache(geom, grid);
  return euclidean_gradient(combiners.w_rf(), combiners.layout().n_rf, cache, sigma2,
                            combiners.mask());
}

}  // namespace crbmo
