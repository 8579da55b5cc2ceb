// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "crbmo/crb.hpp"
#include "crbmo/manifold_opt.hpp"
#include "oracles.hpp"

using namespace crbmo;

namespace {
constexpr double kPi = std::numbers::pi;

AnglePair random_angle(Rng& rng) {
  return {rng.uniform(-kPi / 3, kPi / 3), rng.uniform(5 * kPi / 12, 7 * kPi / 12)};
}
}  // namespace

TEST_CASE("build_a_matrix columns") {
  const UpaGeometry geom{2, 3};
  // cos(theta) = 0 kills the first column
  auto a = build_a_matrix(geom, {kPi / 2, 1.0}, {1.0, 0.0});
  CHECK(a.a_mat.col(0).norm() < 1e-13);
  CHECK((a.a_mat.col(2) - a.a).norm() == 0.0);
  CHECK((a.a_mat.col(3) - Complex(0, 1) * a.a).norm() == 0.0);

  // linear in beta: columns 1-2 double, 3-4 unchanged
  const AnglePair ang{0.4, 1.2};
  const auto a1 = build_a_matrix(geom, ang, {1.0, 0.0});
  const auto a2 = build_a_matrix(geom, ang, {2.0, 0.0});
  CHECK((a2.a_mat.col(0) - 2.0 * a1.a_mat.col(0)).norm() < 1e-15);
  CHECK((a2.a_mat.col(1) - 2.0 * a1.a_mat.col(1)).norm() < 1e-15);
  CHECK((a2.a_mat.col(2) - a1.a_mat.col(2)).norm() == 0.0);
  CHECK((a2.a_mat.col(3) - a1.a_mat.col(3)).norm() == 0.0);
}

TEST_CASE("A matches finite differences over all four real parameters") {
  const UpaGeometry geom{3, 2};
  const AnglePair ang{0.35, 1.15};
  const Complex beta{0.8, -0.5};
  const auto a = build_a_matrix(geom, ang, beta);
  const double h = 1e-6;

  const auto model = [&](double th, double ph, double re, double im) {
    return (Complex(re, im) * steering(geom, {th, ph})).eval();
  };
  const VectorXcd d_th = (model(ang.theta + h, ang.phi, beta.real(), beta.imag()) -
                          model(ang.theta - h, ang.phi, beta.real(), beta.imag())) /
                         (2 * h);
  const VectorXcd d_ph = (model(ang.theta, ang.phi + h, beta.real(), beta.imag()) -
                          model(ang.theta, ang.phi - h, beta.real(), beta.imag())) /
                         (2 * h);
  const VectorXcd d_re = (model(ang.theta, ang.phi, beta.real() + h, beta.imag()) -
                          model(ang.theta, ang.phi, beta.real() - h, beta.imag())) /
                         (2 * h);
  const VectorXcd d_im = (model(ang.theta, ang.phi, beta.real(), beta.imag() + h) -
                          model(ang.theta, ang.phi, beta.real(), beta.imag() - h)) /
                         (2 * h);
  CHECK((a.a_mat.col(0) - d_th).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((a.a_mat.col(1) - d_ph).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((a.a_mat.col(2) - d_re).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((a.a_mat.col(3) - d_im).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("combiner orthogonal to the steering vector zeroes F22") {
  const UpaGeometry geom{2, 4};
  const AnglePair ang{0.3, 1.4};
  const VectorXcd a = steering(geom, ang);
  // single snapshot, N_RF = 2, blocks of 4; choose each block column
  // orthogonal to the matching segment of a
  MatrixXcd w = MatrixXcd::Zero(8, 2);
  for (int m = 0; m < 2; ++m) {
    const VectorXcd seg = a.segment(4 * m, 4);
    w(4 * m + 0, m) = std::conj(seg(1));
    w(4 * m + 1, m) = -std::conj(seg(0));
  }
  const auto am = build_a_matrix(geom, ang, {1.0, 0.0});
  const auto blocks = fisher(w, 2, am, 1.0);
  CHECK(blocks.f22.norm() < 1e-24);
}

TEST_CASE("Fisher matrix is symmetric PSD with consistent blocks") {
  Rng rng(40);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 10; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const auto a = build_a_matrix(geom, random_angle(rng), {0.7, 0.4});
    const auto blocks = fisher(comb, a, 1.3);
    CHECK((blocks.full - blocks.full.transpose()).norm() < 1e-12);
    CHECK((blocks.f21 - blocks.f12.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix4d> eig(blocks.full);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    CHECK(blocks.gamma_scale == 2.0 / (1.3 * 8.0));
  }
}

TEST_CASE("simplified Fisher equals the unsimplified form with any W_BB") {
  Rng rng(41);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 20; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const auto a = build_a_matrix(geom, random_angle(rng), {rng.normal(), rng.normal()});
    const double sigma2 = rng.uniform(0.2, 2.0);
    const auto blocks = fisher(comb, a, sigma2);
    const MatrixXcd w_bb = oracles::random_block_diag_wbb(layout, rng);
    const Matrix4d full_ref = oracles::fisher_unsimplified(comb, a, w_bb, sigma2);
    CHECK((blocks.full - full_ref).norm() < 1e-9 * full_ref.norm());
  }
}

TEST_CASE("stacked analog combiner satisfies the orthogonality identity") {
  Rng rng(42);
  const CombinerLayout layout{12, 3, 2};
  for (int trial = 0; trial < 5; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const MatrixXcd w_hat = oracles::stack_block_diagonal(comb);
    const MatrixXcd gram = w_hat.adjoint() * w_hat;
    const MatrixXcd expected =
        (12.0 / 3.0) * MatrixXcd::Identity(layout.n_columns(), layout.n_columns());
    CHECK((gram - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("crb_trace closed forms and oracle") {
  // diagonal Fisher decouples the parameters
  FisherBlocks diag;
  diag.full = Eigen::Vector4d(2.0, 5.0, 3.0, 7.0).asDiagonal();
  diag.f11 = diag.full.topLeftCorner<2, 2>();
  diag.f12 = diag.full.topRightCorner<2, 2>();
  diag.f21 = diag.full.bottomLeftCorner<2, 2>();
  diag.f22 = diag.full.bottomRightCorner<2, 2>();
  CHECK(crb_trace(diag).trace == doctest::Approx(1.0 / 2.0 + 1.0 / 5.0).epsilon(1e-14));

  // random PSD instance: tr(C11) equals the top-left of the full inverse
  Rng rng(43);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 10; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const auto a = build_a_matrix(geom, random_angle(rng), {1.0, 0.0});
    const auto blocks = fisher(comb, a, 1.0);
    const auto v = crb_trace(blocks);
    const Matrix4d finv = blocks.full.inverse();
    const double ref = finv(0, 0) + finv(1, 1);
    CHECK(std::abs(v.trace - ref) < 1e-10 * std::abs(ref));
    // scaling the Fisher matrix by c scales the CRB by 1/c
    FisherBlocks scaled = blocks;
    scaled.full *= 4.0;
    scaled.f11 *= 4.0;
    scaled.f12 *= 4.0;
    scaled.f21 *= 4.0;
    scaled.f22 *= 4.0;
    CHECK(crb_trace(scaled).trace == doctest::Approx(v.trace / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("singular Fisher raises") {
  FisherBlocks b;
  b.f11 = Matrix2d::Identity();
  b.f12 = Matrix2d::Zero();
  b.f21 = Matrix2d::Zero();
  b.f22 = Matrix2d::Zero();  // cond = inf
  CHECK(!try_crb_trace(b).has_value());
  CHECK_THROWS_AS(crb_trace(b), SingularFisher);

  // ill-conditioned Schur complement
  FisherBlocks s;
  s.f11 << 1.0, 0.0, 0.0, 1e-13;
  s.f12 = Matrix2d::Zero();
  s.f21 = Matrix2d::Zero();
  s.f22 = Matrix2d::Identity();
  CHECK_THROWS_AS(crb_trace(s), SingularFisher);
}

TEST_CASE("objective reduces to crb_trace on a single point") {
  Rng rng(44);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  AngleGrid grid{0.3, 0.9, 1.2, 1.5, 1, 1};
  const auto res = objective(comb, grid, geom, 0.8);
  const auto a = build_a_matrix(geom, {0.3, 1.2}, {1.0, 0.0});
  const double ref = crb_trace(fisher(comb, a, 0.8)).trace;
  CHECK(res.value == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("grid sampling excludes the upper endpoints") {
  AngleGrid grid{0.0, 1.0, 2.0, 3.0, 4, 2};
  CHECK(grid.theta_at(0) == 0.0);
  CHECK(grid.theta_at(3) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(grid.phi_at(1) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("Lemma 1: the CRB scales as 1/|beta|^2 and preserves the argmin") {
  Rng rng(45);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 20; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const AnglePair ang = random_angle(rng);
    const Complex b = {rng.normal(), rng.normal()};
    if (std::abs(b) < 0.1) continue;
    const double t1 = crb_trace(fisher(comb, build_a_matrix(geom, ang, {1.0, 0.0}), 1.0)).trace;
    const double tb = crb_trace(fisher(comb, build_a_matrix(geom, ang, b), 1.0)).trace;
    CHECK(std::abs(tb - t1 / std::norm(b)) < 1e-10 * std::abs(tb));
  }

  // argmin over candidates is invariant to beta
  const AnglePair ang{0.25, 1.45};
  std::vector<CombinerSet> candidates;
  for (int i = 0; i < 5; ++i) candidates.push_back(random_feasible_init(layout, rng));
  const auto argmin_for = [&](Complex beta) {
    int best = -1;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
      const double v =
          crb_trace(fisher(candidates[i], build_a_matrix(geom, ang, beta), 1.0)).trace;
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    return best;
  };
  const int ref = argmin_for({1.0, 0.0});
  for (const Complex b : {Complex{2.0, 0.0}, Complex{0.0, -3.0}, Complex{0.4, 0.9}})
    CHECK(argmin_for(b) == ref);
}

TEST_CASE("objective Lemma-1 scaling against per-term beta recomputation") {
  Rng rng(46);
  const CombinerLayout layout{8, 2, 1};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  AngleGrid grid{-0.5, 0.5, 1.2, 1.7, 2, 2};
  const Complex b{1.3, -0.7};
  const auto base = objective(comb, grid, geom, 1.0);
  double with_beta = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      with_beta += crb_trace(fisher(comb,
                                    build_a_matrix(geom, {grid.theta_at(j), grid.phi_at(k)}, b),
                                    1.0))
                       .trace;
  CHECK(std::abs(with_beta - base.value / std::norm(b)) < 1e-10 * with_beta);
}

TEST_CASE("doubling the noise variance doubles the objective exactly") {
  Rng rng(47);
  const CombinerLayout layout{8, 4, 2};
  const UpaGeometry geom{4, 2};
  const CombinerSet comb = random_feasible_init(layout, rng);
  AngleGrid grid{-0.6, 0.6, 1.3, 1.8, 3, 3};
  const double f1 = objective(comb, grid, geom, 0.5).value;
  const double f2 = objective(comb, grid, geom, 1.0).value;
  CHECK(f2 == 2.0 * f1);
}

TEST_CASE("objective turns singular grid points into +infinity") {
  Rng rng(48);
  const CombinerLayout layout{8, 2, 1};
  const UpaGeometry geom{2, 4};
  const CombinerSet comb = random_feasible_init(layout, rng);
  // phi = 0 makes a1 identically zero (sin(phi) = 0), so F11 is rank
  // deficient and the Schur complement is singular
  AngleGrid grid{0.1, 0.5, 0.0, 1.0, 1, 1};
  const auto res = objective(comb, grid, geom, 1.0);
  CHECK(std::isinf(res.value));
  REQUIRE(res.singular_at.has_value());
  CHECK(res.singular_at->phi == 0.0);
}

TEST_CASE("objective is invariant to an attached digital stage (unsimplified route)") {
  Rng rng(49);
  const CombinerLayout layout{8, 2, 2};
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 5; ++trial) {
    const CombinerSet comb = random_feasible_init(layout, rng);
    const AnglePair ang = random_angle(rng);
    const double sigma2 = 0.9;
    const auto a = build_a_matrix(geom, ang, {1.0, 0.0});
    const double simplified = crb_trace(fisher(comb, a, sigma2)).trace;

    const MatrixXcd w_bb = oracles::random_block_diag_wbb(layout, rng);
    const Matrix4d full = oracles::fisher_unsimplified(comb, a, w_bb, sigma2);
    FisherBlocks blocks;
    blocks.full = full;
    blocks.f11 = full.topLeftCorner<2, 2>();
    blocks.f12 = full.topRightCorner<2, 2>();
    blocks.f21 = full.bottomLeftCorner<2, 2>();
    blocks.f22 = full.bottomRightCorner<2, 2>();
    const double unsimplified = crb_trace(blocks).trace;
    CHECK(std::abs(simplified - unsimplified) < 1e-9 * std::abs(simplified));
  }
}

TEST_CASE("an extra snapshot never increases the CRB") {
  Rng rng(50);
  const UpaGeometry geom{2, 4};
  for (int trial = 0; trial < 10; ++trial) {
    const CombinerSet base = random_feasible_init({8, 2, 2}, rng);
    const CombinerSet ext = random_feasible_init({8, 2, 1}, rng);
    MatrixXcd w(8, 6);
    w << base.w_rf(), ext.w_rf();
    const auto a = build_a_matrix(geom, random_angle(rng), {1.0, 0.0});
    const double before = crb_trace(fisher(base.w_rf(), 2, a, 1.0)).trace;
    const double after = crb_trace(fisher(w, 2, a, 1.0)).trace;
    CHECK(after <= before * (1.0 + 1e-12));
  }
}
