// SPDX-License-Identifier: Apache-2.0
//
// Partially-connected analog combiner: stacked per-snapshot blocks
// [W_RF,0 ... W_RF,N-1] with block-diagonal unit-modulus structure.

#pragma once

#include <Eigen/Dense>
#include <optional>

namespace crbmo {

using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;

/// Shape of the partially-connected architecture: each of the N_RF chains
/// drives a disjoint block of N_BS/N_RF antennas, identically per snapshot.
struct CombinerLayout {
  int n_bs = 0;
  int n_rf = 1;
  int n_snapshots = 1;

  int block_size() const { return n_bs / n_rf; }
  int n_columns() const { return n_rf * n_snapshots; }
  int chain_of_antenna(int row) const { return row / block_size(); }

  /// True when (row, col) is on the block-diagonal support.
  bool on_support(int row, int col) const {
    return chain_of_antenna(row) == col % n_rf;
  }

  /// The sparsity mask P: 1 on support, 0 elsewhere.
  MatrixXd mask() const;

  void validate() const;  // throws std::invalid_argument
};

/// A feasible combiner. Phases are the authoritative storage (one phase per
/// antenna per snapshot); the complex matrix is derived from them, which
/// makes the text serialization round-trip bit-exact.
class CombinerSet {
 public:
  /// Empty; usable only as an assignment target.
  CombinerSet() = default;

  /// phases: n_bs x n_snapshots, entry (i, n) is the phase of antenna i's
  /// single nonzero coefficient in snapshot n.
  static CombinerSet from_phases(const CombinerLayout& layout, const MatrixXd& phases);

  /// Validates support and unit modulus (|entry| = 1 within 1e-12 on the
  /// mask, exact 0 off it), then canonicalizes through atan2 phases.
  static CombinerSet from_matrix(const CombinerLayout& layout, const MatrixXcd& w_rf);

  const CombinerLayout& layout() const { return layout_; }
  const MatrixXd& phases() const { return phases_; }
  const MatrixXcd& w_rf() const { return w_rf_; }
  MatrixXd mask() const { return layout_.mask(); }

  /// Per-snapshot analog block W_RF,n (n_bs x n_rf).
  MatrixXcd snapshot_block(int n) const;

  /// Optional digital stage, block-diagonal (n_rf*N) x (n_rf*N).
  const std::optional<MatrixXcd>& w_bb() const { return w_bb_; }
  void set_w_bb(MatrixXcd w_bb);
  void clear_w_bb() { w_bb_.reset(); }

 private:
  CombinerLayout layout_;
  MatrixXd phases_;
  MatrixXcd w_rf_;
  std::optional<MatrixXcd> w_bb_;
};

/// Stacks W = [W_RF,0*W_BB,0, ...] when a digital stage is present,
/// otherwise returns w_rf unchanged.
MatrixXcd effective_w(const CombinerSet& combiners);

}  // namespace crbmo
