// SPDX-License-Identifier: Apache-2.0
//
// Fisher information and CRB for the LoS DOA under a stacked analog
// combiner, plus the grid-averaged objective being minimized.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "crbmo/array_geometry.hpp"
#include "crbmo/combiner.hpp"

namespace crbmo {

using Matrix2d = Eigen::Matrix2d;
using Matrix4d = Eigen::Matrix4d;

/// Raised when F22 or the Schur complement is numerically singular
/// (condition number above 1e12) -- the combiner is uninformative at that
/// angle.
class SingularFisher : public std::runtime_error {
 public:
  explicit SingularFisher(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kSingularCondLimit = 1e12;

/// A = [beta*a1, beta*a2, a, j*a] and its ingredients.
struct DerivativeMatrixA {
  VectorXcd a1;      // d a / d theta
  VectorXcd a2;      // d a / d phi
  VectorXcd a;       // steering vector
  Complex beta;      // effective gain used in the first two columns
  MatrixXcd a_mat;   // n_bs x 4 assembled matrix

  MatrixXcd a1_block() const { return a_mat.leftCols<2>(); }   // [beta*a1, beta*a2]
  MatrixXcd a2_block() const { return a_mat.rightCols<2>(); }  // [a, j*a]
};

DerivativeMatrixA build_a_matrix(const UpaGeometry& geom, const AnglePair& angle,
                                 Complex beta);

/// 2x2 real blocks of the simplified Fisher matrix
/// F = (2*N_RF / (sigma2*N_BS)) Re{A^H W_RF W_RF^H A}, with the prefactor
/// included in the blocks. gamma_scale = N_RF/(sigma2*N_BS).
struct FisherBlocks {
  Matrix2d f11, f12, f21, f22;
  Matrix4d full;
  double gamma_scale = 0.0;
};

/// Computed through the (N_RF*N)-sized product B = W_RF^H A; the N_BS^2
/// outer product is never formed.
FisherBlocks fisher(const MatrixXcd& w_rf, int n_rf, const DerivativeMatrixA& a,
                    double sigma2);
FisherBlocks fisher(const CombinerSet& combiners, const DerivativeMatrixA& a,
                    double sigma2);

/// tr(C11) with C11 = (F11 - F12 F22^-1 F21)^-1, plus the 2x2 C11 itself.
struct CrbValue {
  double trace = 0.0;
  Matrix2d c11;
};

/// Non-throwing variant: empty optional when singular.
std::optional<CrbValue> try_crb_trace(const FisherBlocks& blocks);

/// Throws SingularFisher when cond(F22) or cond(Schur) exceeds 1e12.
CrbValue crb_trace(const FisherBlocks& blocks);

/// Uniform DOA sampling grid; the upper endpoints are excluded:
/// theta_j = theta_lo + (j/J)(theta_hi - theta_lo), j = 0..J-1.
struct AngleGrid {
  double theta_lo = 0.0, theta_hi = 0.0;
  double phi_lo = 0.0, phi_hi = 0.0;
  int j_count = 1, k_count = 1;

  double theta_at(int j) const {
    return theta_lo + (static_cast<double>(j) / j_count) * (theta_hi - theta_lo);
  }
  double phi_at(int k) const {
    return phi_lo + (static_cast<double>(k) / k_count) * (phi_hi - phi_lo);
  }
  int n_points() const { return j_count * k_count; }
  void validate() const;  // throws std::invalid_argument
};

/// Per-grid-point steering data (a, a1, a2 at beta = 1), computed once per
/// grid and reused across optimizer iterations. Falls back to on-the-fly
/// evaluation when the cache would exceed the memory cap.
class SteeringCache {
 public:
  struct Point {
    VectorXcd a, a1, a2;
  };

  SteeringCache(const UpaGeometry& geom, const AngleGrid& grid,
                std::size_t memory_cap_bytes = std::size_t{256} << 20);

  const UpaGeometry& geom() const { return geom_; }
  const AngleGrid& grid() const { return grid_; }

  /// Point for grid index (j, k). `scratch` is used when uncached.
  const Point& point(int j, int k, Point& scratch) const;

 private:
  UpaGeometry geom_;
  AngleGrid grid_;
  std::vector<Point> cache_;  // row-major over j then k; empty if over cap
};

/// Grid-summed objective f = sum_jk tr(C11(theta_j, phi_k)) at beta = 1.
/// A singular grid point makes the value +infinity and reports the angle.
struct ObjectiveResult {
  double value = 0.0;
  std::optional<AnglePair> singular_at;
};

ObjectiveResult objective(const MatrixXcd& w_rf, int n_rf, const SteeringCache& cache,
                          double sigma2);
ObjectiveResult objective(const CombinerSet& combiners, const AngleGrid& grid,
                          const UpaGeometry& geom, double sigma2);

namespace detail {
/// Condition number of a symmetric 2x2 expected PSD; +inf if not positive.
double sym2x2_cond(const Matrix2d& m);
Matrix2d inv2x2(const Matrix2d& m);
}  // namespace detail

}  // namespace crbmo
