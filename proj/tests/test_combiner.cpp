// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "crbmo/combiner.hpp"
#include "crbmo/combiner_io.hpp"
#include "crbmo/manifold_opt.hpp"
#include "crbmo/rng.hpp"

using namespace crbmo;

namespace {
const CombinerLayout kLayout{8, 2, 3};
}

TEST_CASE("mask is block-diagonal with N_BS/N_RF ones per column") {
  const MatrixXd mask = kLayout.mask();
  REQUIRE(mask.rows() == 8);
  REQUIRE(mask.cols() == 6);
  for (int c = 0; c < mask.cols(); ++c) CHECK(mask.col(c).sum() == 4.0);
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c)
      CHECK(mask(r, c) == (kLayout.on_support(r, c) ? 1.0 : 0.0));
  // disjoint blocks: each row hits exactly one column per snapshot
  for (int r = 0; r < mask.rows(); ++r)
    for (int n = 0; n < kLayout.n_snapshots; ++n)
      CHECK(mask.row(r).segment(n * kLayout.n_rf, kLayout.n_rf).sum() == 1.0);
}

TEST_CASE("layout validation") {
  CHECK_THROWS_AS(CombinerLayout({9, 2, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CombinerLayout({0, 1, 1}).validate(), std::invalid_argument);
  CHECK_NOTHROW(CombinerLayout({8, 4, 2}).validate());
}

TEST_CASE("from_phases builds a feasible combiner") {
  Rng rng(9);
  const CombinerSet c = random_feasible_init(kLayout, rng);
  const MatrixXd mask = kLayout.mask();
  for (int r = 0; r < 8; ++r) {
    for (int col = 0; col < 6; ++col) {
      if (mask(r, col) == 1.0) {
        CHECK(std::abs(std::abs(c.w_rf()(r, col)) - 1.0) < 1e-12);
      } else {
        CHECK(c.w_rf()(r, col) == Complex(0.0, 0.0));
      }
    }
  }
}

TEST_CASE("from_matrix validates and canonicalizes") {
  Rng rng(10);
  const CombinerSet c = random_feasible_init(kLayout, rng);
  const CombinerSet again = CombinerSet::from_matrix(kLayout, c.w_rf());
  CHECK(again.w_rf() == c.w_rf());  // canonical form is a fixed point

  MatrixXcd bad = c.w_rf();
  bad(0, 0) *= 1.5;
  CHECK_THROWS_AS(CombinerSet::from_matrix(kLayout, bad), std::invalid_argument);

  MatrixXcd off = c.w_rf();
  off(7, 0) = Complex(1.0, 0.0);  // row 7 belongs to chain 1, column 0 is chain 0
  CHECK_THROWS_AS(CombinerSet::from_matrix(kLayout, off), std::invalid_argument);
}

TEST_CASE("w_bb must be block-diagonal") {
  Rng rng(11);
  CombinerSet c = random_feasible_init(kLayout, rng);
  MatrixXcd bb = MatrixXcd::Identity(6, 6);
  CHECK_NOTHROW(c.set_w_bb(bb));
  bb(0, 2) = Complex(1.0, 0.0);  // crosses snapshot blocks
  CHECK_THROWS_AS(c.set_w_bb(bb), std::invalid_argument);
}

TEST_CASE("combiner file round trip is bit-exact") {
  Rng rng(12);
  const UpaGeometry geom{2, 4};
  const CombinerSet c = random_feasible_init(kLayout, rng);
  const std::string text = serialize_combiner(geom, c);

  const LoadedCombiner loaded = parse_combiner(text, "mem");
  CHECK(loaded.geom.p_rows == 2);
  CHECK(loaded.geom.q_cols == 4);
  CHECK(loaded.combiners.phases() == c.phases());
  CHECK(loaded.combiners.w_rf() == c.w_rf());

  // file-level fixed point
  CHECK(serialize_combiner(loaded.geom, loaded.combiners) == text);
}

TEST_CASE("combiner parser rejects malformed input") {
  Rng rng(13);
  const UpaGeometry geom{2, 4};
  const CombinerSet c = random_feasible_init(kLayout, rng);
  std::string text = serialize_combiner(geom, c);

  CHECK_THROWS(parse_combiner(text + " 1.0", "mem"));              // extra value
  CHECK_THROWS(parse_combiner(text.substr(0, text.size() - 10), "mem"));  // truncated
  CHECK_THROWS(parse_combiner("format = other\nphases\n", "mem"));
}

TEST_CASE("effective_w applies the digital stage per snapshot") {
  Rng rng(14);
  CombinerSet c = random_feasible_init(kLayout, rng);
  CHECK(effective_w(c) == c.w_rf());

  MatrixXcd bb = MatrixXcd::Zero(6, 6);
  for (int n = 0; n < 3; ++n) {
    bb.block(2 * n, 2 * n, 2, 2) << Complex(0, 1), Complex(2, 0), Complex(0, 0),
        Complex(1, -1);
  }
  c.set_w_bb(bb);
  const MatrixXcd w = effective_w(c);
  for (int n = 0; n < 3; ++n) {
    const MatrixXcd expected = c.snapshot_block(n) * bb.block(2 * n, 2 * n, 2, 2);
    CHECK((w.middleCols(2 * n, 2) - expected).norm() == 0.0);
  }
}
