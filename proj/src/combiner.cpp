// SPDX-License-Identifier: Apache-2.0

#include "crbmo/combiner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crbmo {

MatrixXd CombinerLayout::mask() const {
  validate();
  MatrixXd m = MatrixXd::Zero(n_bs, n_columns());
  for (int row = 0; row < n_bs; ++row)
    for (int n = 0; n < n_snapshots; ++n) m(row, n * n_rf + chain_of_antenna(row)) = 1.0;
  return m;
}

void CombinerLayout::validate() const {
  if (n_bs < 1 || n_rf < 1 || n_snapshots < 1)
    throw std::invalid_argument("CombinerLayout: counts must be >= 1");
  if (n_bs % n_rf != 0)
    throw std::invalid_argument("CombinerLayout: N_BS must be divisible by N_RF");
}

CombinerSet CombinerSet::from_phases(const CombinerLayout& layout, const MatrixXd& phases) {
  layout.validate();
  if (phases.rows() != layout.n_bs || phases.cols() != layout.n_snapshots)
    throw std::invalid_argument("CombinerSet: phases must be n_bs x n_snapshots");
  if (!phases.allFinite()) throw std::invalid_argument("CombinerSet: non-finite phase");

  CombinerSet c;
  c.layout_ = layout;
  c.phases_ = phases;
  c.w_rf_ = MatrixXcd::Zero(layout.n_bs, layout.n_columns());
  for (int row = 0; row < layout.n_bs; ++row) {
    const int chain = layout.chain_of_antenna(row);
    for (int n = 0; n < layout.n_snapshots; ++n) {
      const double ph = phases(row, n);
      c.w_rf_(row, n * layout.n_rf + chain) = {std::cos(ph), std::sin(ph)};
    }
  }
  return c;
}

CombinerSet CombinerSet::from_matrix(const CombinerLayout& layout, const MatrixXcd& w_rf) {
  layout.validate();
  if (w_rf.rows() != layout.n_bs || w_rf.cols() != layout.n_columns())
    throw std::invalid_argument("CombinerSet: matrix must be n_bs x (n_rf*n_snapshots)");

  MatrixXd phases(layout.n_bs, layout.n_snapshots);
  for (int row = 0; row < layout.n_bs; ++row) {
    for (int col = 0; col < layout.n_columns(); ++col) {
      const auto z = w_rf(row, col);
      if (layout.on_support(row, col)) {
        if (std::abs(std::abs(z) - 1.0) > 1e-12)
          throw std::invalid_argument("CombinerSet: entry (" + std::to_string(row) + "," +
                                      std::to_string(col) + ") is not unit modulus");
        phases(row, col / layout.n_rf) = std::atan2(z.imag(), z.real());
      } else if (z != 0.0) {
        throw std::invalid_argument("CombinerSet: nonzero entry off the mask support");
      }
    }
  }
  return from_phases(layout, phases);
}

MatrixXcd CombinerSet::snapshot_block(int n) const {
  if (n < 0 || n >= layout_.n_snapshots) throw std::out_of_range("snapshot index");
  return w_rf_.middleCols(static_cast<Eigen::Index>(n) * layout_.n_rf, layout_.n_rf);
}

void CombinerSet::set_w_bb(MatrixXcd w_bb) {
  const int dim = layout_.n_columns();
  if (w_bb.rows() != dim || w_bb.cols() != dim)
    throw std::invalid_argument("w_bb must be (n_rf*n_snapshots) square");
  // block-diagonal: zero outside the per-snapshot n_rf x n_rf blocks
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (r / layout_.n_rf != c / layout_.n_rf && w_bb(r, c) != 0.0)
        throw std::invalid_argument("w_bb must be block-diagonal per snapshot");
  w_bb_ = std::move(w_bb);
}

MatrixXcd effective_w(const CombinerSet& combiners) {
  if (!combiners.w_bb()) return combiners.w_rf();
  const int n_rf = combiners.layout().n_rf;
  const auto& bb = *combiners.w_bb();
  MatrixXcd w(combiners.w_rf().rows(), combiners.w_rf().cols());
  for (int n = 0; n < combiners.layout().n_snapshots; ++n) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(n) * n_rf;
    w.middleCols(c0, n_rf) =
        combiners.w_rf().middleCols(c0, n_rf) * bb.block(c0, c0, n_rf, n_rf);
  }
  return w;
}

}  // namespace crbmo
