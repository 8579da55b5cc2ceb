// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "crbmo/gradient.hpp"
#include "crbmo/manifold_opt.hpp"
#include "oracles.hpp"

using namespace crbmo;

namespace {
constexpr double kPi = std::numbers::pi;

AngleGrid small_grid(Rng& rng, int j, int k) {
  const double t0 = rng.uniform(-kPi / 3, 0.0);
  const double p0 = rng.uniform(0.8, 1.4);
  return {t0, t0 + rng.uniform(0.2, 0.8), p0, p0 + rng.uniform(0.2, 0.6), j, k};
}

// dense reconstruction of one point's M = J + K - 2*Herm(Q) and its masked
// gradient contribution, straight from the factor pairs
MatrixXcd dense_contribution(const GradientTerms& t, const MatrixXcd& w, double gamma) {
  const MatrixXcd j = t.j_left * t.j_right.adjoint();
  const MatrixXcd k = t.k_left * t.k_right.adjoint();
  const MatrixXcd q = t.q_left * t.q_right.adjoint();
  const MatrixXcd m = j + k - q - q.adjoint();
  return 2.0 * gamma * (m * w);
}
}  // namespace

TEST_CASE("T closed forms") {
  const UpaGeometry geom{2, 4};
  const auto a = build_a_matrix(geom, {0.3, 1.2}, {1.0, 0.0});

  FisherBlocks b;
  b.f11 = Matrix2d::Identity();
  b.f12 = Matrix2d::Zero();
  b.f21 = Matrix2d::Zero();
  b.f22 = Matrix2d::Identity();
  CHECK((build_gradient_terms(b, a).t_mat + Matrix2d::Identity()).norm() < 1e-15);

  b.f11 = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  const Matrix2d t = build_gradient_terms(b, a).t_mat;
  CHECK(t(0, 0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(t(1, 1) == doctest::Approx(-0.0625).epsilon(1e-14));
  CHECK(std::abs(t(0, 1)) < 1e-15);
}

TEST_CASE("T matches the spectral oracle on random PSD Schur complements") {
  Rng rng(60);
  const UpaGeometry geom{2, 4};
  const auto a = build_a_matrix(geom, {0.3, 1.2}, {1.0, 0.0});
  for (int trial = 0; trial < 20; ++trial) {
    Matrix2d r;
    r << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    const Matrix2d s = r * r.transpose() + 0.5 * Matrix2d::Identity();
    FisherBlocks b;
    b.f11 = s;
    b.f12 = Matrix2d::Zero();
    b.f21 = Matrix2d::Zero();
    b.f22 = Matrix2d::Identity();
    const Matrix2d t = build_gradient_terms(b, a).t_mat;
    Eigen::SelfAdjointEigenSolver<Matrix2d> eig(s);
    const Matrix2d t_ref = -(eig.eigenvectors() *
                             eig.eigenvalues().array().square().inverse().matrix().asDiagonal() *
                             eig.eigenvectors().transpose());
    CHECK((t - t_ref).norm() < 1e-12 * t_ref.norm());
  }
}

TEST_CASE("gradient terms reconstruct Hermitian J and K") {
  Rng rng(61);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 10; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const auto a = build_a_matrix(
        geom, {rng.uniform(-1.0, 1.0), rng.uniform(0.8, 2.0)}, {1.0, 0.0});
    const auto terms = build_gradient_terms(fisher(comb, a, 1.0), a);
    const MatrixXcd j = terms.j_left * terms.j_right.adjoint();
    const MatrixXcd k = terms.k_left * terms.k_right.adjoint();
    CHECK((j - j.adjoint()).norm() < 1e-10 * std::max(1.0, j.norm()));
    CHECK((k - k.adjoint()).norm() < 1e-10 * std::max(1.0, k.norm()));
  }
}

TEST_CASE("factored gradient equals the dense reference") {
  Rng rng(62);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  const AngleGrid grid = small_grid(rng, 2, 2);
  const double sigma2 = 1.1;
  const double gamma = 2.0 / (sigma2 * 8.0);

  const SteeringCache cache(geom, grid);
  const MatrixXcd grad =
      euclidean_gradient(comb.w_rf(), 2, cache, sigma2, comb.mask());

  MatrixXcd dense = MatrixXcd::Zero(8, 4);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const auto a =
          build_a_matrix(geom, {grid.theta_at(j), grid.phi_at(k)}, {1.0, 0.0});
      const auto terms = build_gradient_terms(fisher(comb, a, sigma2), a);
      dense += dense_contribution(terms, comb.w_rf(), gamma);
    }
  }
  dense = dense.cwiseProduct(comb.mask().cast<Complex>());
  CHECK((grad - dense).cwiseAbs().maxCoeff() < 1e-10 * dense.norm());
}

TEST_CASE("gradient support matches the mask exactly") {
  Rng rng(63);
  const CombinerLayout layout{8, 4, 2};
  const UpaGeometry geom{4, 2};
  const CombinerSet comb = random_feasible_init(layout, rng);
  const AngleGrid grid = small_grid(rng, 2, 3);
  const MatrixXcd grad = euclidean_gradient(comb, grid, geom, 1.0);
  const MatrixXd mask = comb.mask();
  for (Eigen::Index c = 0; c < grad.cols(); ++c)
    for (Eigen::Index r = 0; r < grad.rows(); ++r)
      if (mask(r, c) == 0.0) CHECK(grad(r, c) == Complex(0.0, 0.0));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(64);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  const AngleGrid grid = small_grid(rng, 1, 1);
  const double sigma2 = 0.8;
  const SteeringCache cache(geom, grid);
  const MatrixXd mask = comb.mask();

  const auto f = [&](const MatrixXcd& w) { return objective(w, 2, cache, sigma2).value; };
  const MatrixXcd grad = euclidean_gradient(comb.w_rf(), 2, cache, sigma2, mask);

  const double h = 1e-6;
  for (int d = 0; d < 20; ++d) {
    const MatrixXcd dir = oracles::random_masked_direction(mask, rng);
    const double fd = (f(comb.w_rf() + h * dir) - f(comb.w_rf() - h * dir)) / (2 * h);
    const double predicted = 2.0 * (grad.conjugate().cwiseProduct(dir)).sum().real();
    CHECK(std::abs(predicted - fd) < 1e-5 * std::max(std::abs(fd), std::abs(predicted)));
  }
}

TEST_CASE("gradient over a union grid is the sum over the parts") {
  Rng rng(65);
  const CombinerLayout layout{8, 2, 1};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  const double sigma2 = 1.0;

  // two-point grid along theta vs the two single points
  AngleGrid both{0.2, 0.8, 1.3, 1.6, 2, 1};
  AngleGrid first{both.theta_at(0), 1.0, 1.3, 1.6, 1, 1};
  AngleGrid second{both.theta_at(1), 1.0, 1.3, 1.6, 1, 1};
  const MatrixXcd g_both = euclidean_gradient(comb, both, geom, sigma2);
  const MatrixXcd g_sum = euclidean_gradient(comb, first, geom, sigma2) +
                          euclidean_gradient(comb, second, geom, sigma2);
  CHECK((g_both - g_sum).norm() < 1e-12 * g_sum.norm());
}

TEST_CASE("gradient raises on singular grid points") {
  Rng rng(66);
  const CombinerLayout layout{8, 2, 1};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  AngleGrid grid{0.1, 0.5, 0.0, 1.0, 1, 1};  // phi = 0 makes a1 vanish
  CHECK_THROWS_AS(euclidean_gradient(comb, grid, geom, 1.0), SingularFisher);
}

TEST_CASE("objective_and_gradient agrees with the separate entry points") {
  Rng rng(67);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  const AngleGrid grid = small_grid(rng, 3, 2);
  const SteeringCache cache(geom, grid);
  const auto both = objective_and_gradient(comb.w_rf(), 2, cache, 1.0, comb.mask());
  const auto obj = objective(comb.w_rf(), 2, cache, 1.0);
  const MatrixXcd grad = euclidean_gradient(comb.w_rf(), 2, cache, 1.0, comb.mask());
  CHECK(both.value == doctest::Approx(obj.value).epsilon(1e-12));
  CHECK((both.gradient - grad).norm() == 0.0);
}
