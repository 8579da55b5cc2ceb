// SPDX-License-Identifier: Apache-2.0

#include "crbmo/crb.hpp"

#include <cmath>
#include <limits>

namespace crbmo {

DerivativeMatrixA build_a_matrix(const UpaGeometry& geom, const AnglePair& angle,
                                 Complex beta) {
  DerivativeMatrixA out;
  out.a = steering(geom, angle);
  out.a1 = steering_dtheta(geom, angle);
  out.a2 = steering_dphi(geom, angle);
  out.beta = beta;
  out.a_mat.resize(geom.n_bs(), 4);
  out.a_mat.col(0) = beta * out.a1;
  out.a_mat.col(1) = beta * out.a2;
  out.a_mat.col(2) = out.a;
  out.a_mat.col(3) = Complex(0.0, 1.0) * out.a;
  return out;
}

FisherBlocks fisher(const MatrixXcd& w_rf, int n_rf, const DerivativeMatrixA& a,
                    double sigma2) {
  if (w_rf.rows() != a.a_mat.rows())
    throw std::invalid_argument("fisher: combiner/steering dimension mismatch");
  if (sigma2 <= 0.0) throw std::invalid_argument("fisher: sigma2 must be positive");
  const double n_bs = static_cast<double>(w_rf.rows());
  const double gamma = n_rf / (sigma2 * n_bs);

  const MatrixXcd b = w_rf.adjoint() * a.a_mat;  // (n_rf*N) x 4
  FisherBlocks out;
  out.gamma_scale = gamma;
  out.full = 2.0 * gamma * (b.adjoint() * b).real();
  out.f11 = out.full.topLeftCorner<2, 2>();
  out.f12 = out.full.topRightCorner<2, 2>();
  out.f21 = out.full.bottomLeftCorner<2, 2>();
  out.f22 = out.full.bottomRightCorner<2, 2>();
  return out;
}

FisherBlocks fisher(const CombinerSet& combiners, const DerivativeMatrixA& a,
                    double sigma2) {
  return fisher(combiners.w_rf(), combiners.layout().n_rf, a, sigma2);
}

namespace detail {

double sym2x2_cond(const Matrix2d& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double diff = m(0, 0) - m(1, 1);
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  const double r = std::sqrt(0.25 * diff * diff + off * off);
  const double lo = 0.5 * tr - r;
  const double hi = 0.5 * tr + r;
  if (!(lo > 0.0) || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Matrix2d inv2x2(const Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

}  // namespace detail

using detail::inv2x2;
using detail::sym2x2_cond;

std::optional<CrbValue> try_crb_trace(const FisherBlocks& blocks) {
  if (sym2x2_cond(blocks.f22) > kSingularCondLimit) return std::nullopt;
  const Matrix2d schur = blocks.f11 - blocks.f12 * inv2x2(blocks.f22) * blocks.f21;
  if (sym2x2_cond(schur) > kSingularCondLimit) return std::nullopt;
  CrbValue v;
  v.c11 = inv2x2(schur);
  v.trace = v.c11(0, 0) + v.c11(1, 1);
  return v;
}

CrbValue crb_trace(const FisherBlocks& blocks) {
  auto v = try_crb_trace(blocks);
  if (!v) throw SingularFisher("singular Fisher information (cond > 1e12)");
  return *v;
}

void AngleGrid::validate() const {
  if (j_count < 1 || k_count < 1)
    throw std::invalid_argument("AngleGrid: J and K must be >= 1");
  if (!(std::isfinite(theta_lo) && std::isfinite(theta_hi) && std::isfinite(phi_lo) &&
        std::isfinite(phi_hi)))
    throw std::invalid_argument("AngleGrid: non-finite bounds");
}

SteeringCache::SteeringCache(const UpaGeometry& geom, const AngleGrid& grid,
                             std::size_t memory_cap_bytes)
    : geom_(geom), grid_(grid) {
  grid.validate();
  const std::size_t bytes = static_cast<std::size_t>(grid.n_points()) * 3u *
                            static_cast<std::size_t>(geom.n_bs()) * sizeof(Complex);
  if (bytes > memory_cap_bytes) return;
  cache_.reserve(grid.n_points());
  for (int j = 0; j < grid.j_count; ++j) {
    for (int k = 0; k < grid.k_count; ++k) {
      const AnglePair ang{grid.theta_at(j), grid.phi_at(k)};
      cache_.push_back({steering(geom_, ang), steering_dtheta(geom_, ang),
                        steering_dphi(geom_, ang)});
    }
  }
}

const SteeringCache::Point& SteeringCache::point(int j, int k, Point& scratch) const {
  if (!cache_.empty()) return cache_[static_cast<std::size_t>(j) * grid_.k_count + k];
  const AnglePair ang{grid_.theta_at(j), grid_.phi_at(k)};
  scratch.a = steering(geom_, ang);
  scratch.a1 = steering_dtheta(geom_, ang);
  scratch.a2 = steering_dphi(geom_, ang);
  return scratch;
}

ObjectiveResult objective(const MatrixXcd& w_rf, int n_rf, const SteeringCache& cache,
                          double sigma2) {
  const AngleGrid& grid = cache.grid();
  const double gamma2 = 2.0 * n_rf / (sigma2 * static_cast<double>(w_rf.rows()));
  SteeringCache::Point scratch;
  ObjectiveResult out;
  // fixed row-major accumulation order over j then k
  for (int j = 0; j < grid.j_count; ++j) {
    for (int k = 0; k < grid.k_count; ++k) {
      const auto& pt = cache.point(j, k, scratch);
      const VectorXcd u1 = w_rf.adjoint() * pt.a1;
      const VectorXcd u2 = w_rf.adjoint() * pt.a2;
      const VectorXcd u = w_rf.adjoint() * pt.a;
      FisherBlocks blocks;
      blocks.gamma_scale = 0.5 * gamma2;
      blocks.f11 << u1.squaredNorm(), u1.dot(u2).real(), u1.dot(u2).real(),
          u2.squaredNorm();
      blocks.f11 *= gamma2;
      const Complex c1 = u1.dot(u);  // u1^H u
      const Complex c2 = u2.dot(u);
      blocks.f12 << c1.real(), -c1.imag(), c2.real(), -c2.imag();
      blocks.f12 *= gamma2;
      blocks.f21 = blocks.f12.transpose();
      blocks.f22 = gamma2 * u.squaredNorm() * Matrix2d::Identity();
      const auto v = try_crb_trace(blocks);
      if (!v) {
        out.value = std::numeric_limits<double>::infinity();
        out.singular_at = AnglePair{grid.theta_at(j), grid.phi_at(k)};
        return out;
      }
      out.value += v->trace;
    }
  }
  return out;
}

ObjectiveResult objective(const CombinerSet& combiners, const AngleGrid& grid,
                          const UpaGeometry& geom, double sigma2) {
  SteeringCache cache(geom, grid);
  return objective(combiners.w_rf(), combiners.layout().n_rf, cache, sigma2);
}

}  // namespace crbmo
