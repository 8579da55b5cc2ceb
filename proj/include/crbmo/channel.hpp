// SPDX-License-Identifier: Apache-2.0
//
// Geometry-based mmWave channel and received-pilot synthesis.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "crbmo/array_geometry.hpp"
#include "crbmo/combiner.hpp"
#include "crbmo/rng.hpp"

namespace crbmo {

/// One propagation path. Index 0 in a path list is the LoS path.
struct PathParams {
  Complex alpha{1.0, 0.0};  // complex gain
  AnglePair doa;            // arrival (theta, phi) at the BS
  double dod_psi = 0.0;     // departure azimuth at the UE
  double dod_gamma = 0.0;   // departure elevation (unused by the ULA UE model)
};

/// UE side: half-wavelength ULA over the departure azimuth, fully digital.
struct UeConfig {
  int n_ue = 1;
  VectorXcd precoder_v;  // ||v||^2 = tx_power
  double tx_power = 1.0;

  void validate() const;  // throws std::invalid_argument
};

/// beta = sqrt(N_BS*N_UE/L) * alpha * a_UE(psi)^H v; the channel
/// normalization is folded in so the pilot model and the channel matrix
/// agree (single source of truth for scaling).
struct EffectiveGain {
  Complex beta{0.0, 0.0};
};

/// UE array response: unit-norm ULA ramp over sin(psi).
VectorXcd ue_steering(int n_ue, double psi);

/// Precoder matched to the given departure direction, ||v||^2 = tx_power.
VectorXcd matched_precoder(int n_ue, double psi, double tx_power);

/// H = sqrt(N_BS*N_UE/L) * sum_l alpha_l a_BS(theta_l,phi_l) a_UE(psi_l)^H.
MatrixXcd channel_matrix(const UpaGeometry& geom, const UeConfig& ue,
                         const std::vector<PathParams>& paths);

EffectiveGain effective_beta(const UpaGeometry& geom, const PathParams& path,
                             const UeConfig& ue, int n_paths_total);

/// Combined, de-rotated pilots: y~_n = W_n^H (H v s_n + z_n) s_n^*, stacked
/// over snapshots (length n_rf * n_snapshots). Noise is CN(0, sigma2 I) per
/// antenna, drawn from `rng` in snapshot order (real, imag per entry).
VectorXcd synthesize_pilots(const MatrixXcd& h, const UeConfig& ue,
                            const CombinerSet& combiners, double sigma2,
                            const VectorXcd& seq, Rng& rng);

/// Same, with the raw CN(0,1) noise block (n_bs x n_snapshots) supplied by
/// the caller; it is scaled by sqrt(sigma2) inside. Lets a sweep reuse one
/// noise draw across SNR points and combiner types.
VectorXcd synthesize_pilots_with_noise(const MatrixXcd& h, const UeConfig& ue,
                                       const CombinerSet& combiners, double sigma2,
                                       const VectorXcd& seq, const MatrixXcd& noise_raw);

/// Draws the raw CN(0,1) noise block used by synthesize_pilots_with_noise.
MatrixXcd draw_noise_block(int n_bs, int n_snapshots, Rng& rng);

}  // namespace crbmo
